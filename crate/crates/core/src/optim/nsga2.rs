//! Generational NSGA-II and its sequential-crowding variant.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::sorting::{crowding_distance, crowding_select, fast_nondominated_sort, scd_select};
use super::variation::{polynomial_mutation, sbx};
use super::{objectives, rng_for, Evaluator, OptimizerConfig, RunResult};
use crate::error::Result;
use crate::problems::ProblemSpec;
use crate::trace::Solution;

pub fn run_nsga2(spec: &ProblemSpec, cfg: &OptimizerConfig) -> Result<RunResult> {
    generational(spec, cfg, |p, mu| crowding_select(p, mu))
}

pub fn run_scd_nsga2(spec: &ProblemSpec, cfg: &OptimizerConfig) -> Result<RunResult> {
    generational(spec, cfg, |p, mu| scd_select(p, mu))
}

fn generational(
    spec: &ProblemSpec,
    cfg: &OptimizerConfig,
    survive: impl Fn(&[&[f64]], usize) -> Vec<usize>,
) -> Result<RunResult> {
    let mut eval = Evaluator::new(spec, cfg)?;
    let mut rng = rng_for(cfg);
    let var = &cfg.params.variation;
    let pm = var.mutation_prob_for(spec.n);
    let mut pop = eval.initial_population(&mut rng, cfg.mu)?;

    while eval.remaining() > 0 {
        let lambda = cfg.mu.min(eval.remaining());
        let (rank, crowd) = rank_and_crowding(&pop);
        let mut offspring = Vec::with_capacity(lambda);
        while offspring.len() < lambda {
            let a = tournament(&mut rng, &rank, &crowd);
            let b = tournament(&mut rng, &rank, &crowd);
            let (c1, c2) = sbx(&mut rng, &pop[a].x, &pop[b].x, &spec.lower, &spec.upper, var.crossover_prob, var.crossover_eta);
            for mut c in [c1, c2] {
                if offspring.len() == lambda {
                    break;
                }
                polynomial_mutation(&mut rng, &mut c, &spec.lower, &spec.upper, pm, var.mutation_eta);
                offspring.push(eval.evaluate(c)?);
            }
        }
        pop.extend(offspring);
        let keep = survive(&objectives(&pop), cfg.mu);
        pop = keep.into_iter().map(|i| pop[i].clone()).collect();
    }
    Ok(eval.finish(pop))
}

fn rank_and_crowding(pop: &[Solution]) -> (Vec<usize>, Vec<f64>) {
    let objs = objectives(pop);
    let mut rank = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    for (r, front) in fast_nondominated_sort(&objs).into_iter().enumerate() {
        let pts: Vec<&[f64]> = front.iter().map(|&i| objs[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&pts)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

/// Binary tournament on (rank, crowding distance); full ties go to a coin flip.
fn tournament(rng: &mut ChaCha8Rng, rank: &[usize], crowd: &[f64]) -> usize {
    let n = rank.len();
    let a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    match rank[a].cmp(&rank[b]).then(crowd[b].total_cmp(&crowd[a])) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => {
            if rng.random::<bool>() {
                a
            } else {
                b
            }
        }
    }
}
