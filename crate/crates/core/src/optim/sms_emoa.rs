//! Steady-state (μ+1) SMS-EMOA.

use rand::Rng;

use super::sorting::sms_removal;
use super::variation::{polynomial_mutation, sbx};
use super::{objectives, rng_for, Evaluator, OptimizerConfig, RunResult};
use crate::error::Result;
use crate::problems::ProblemSpec;

pub fn run_sms_emoa(spec: &ProblemSpec, cfg: &OptimizerConfig) -> Result<RunResult> {
    let mut eval = Evaluator::new(spec, cfg)?;
    let mut rng = rng_for(cfg);
    let var = &cfg.params.variation;
    let pm = var.mutation_prob_for(spec.n);
    let mut pop = eval.initial_population(&mut rng, cfg.mu)?;

    while eval.remaining() > 0 {
        let a = rng.random_range(0..pop.len());
        let mut b = rng.random_range(0..pop.len() - 1);
        if b >= a {
            b += 1;
        }
        let (mut child, _) = sbx(&mut rng, &pop[a].x, &pop[b].x, &spec.lower, &spec.upper, var.crossover_prob, var.crossover_eta);
        polynomial_mutation(&mut rng, &mut child, &spec.lower, &spec.upper, pm, var.mutation_eta);
        pop.push(eval.evaluate(child)?);
        let out = sms_removal(&objectives(&pop), &spec.hv_ref)?;
        pop.remove(out);
    }
    Ok(eval.finish(pop))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicators::hypervolume_2d;
    use crate::optim::sorting::fast_nondominated_sort;
    use crate::optim::AlgorithmId;
    use crate::problems::ProblemId;
    use crate::trace::Solution;

    #[test]
    fn hypervolume_never_drops_once_nondominated() {
        // replay the steady-state loop from the trace: the i-th offspring is
        // trace entry mu + i
        let spec = ProblemSpec::new(ProblemId::Sphere);
        let cfg = OptimizerConfig::new(AlgorithmId::SmsEmoa, 10, 600, 5);
        let r = run_sms_emoa(&spec, &cfg).unwrap();
        let mut pop: Vec<Solution> = r.trace.solutions[..10].to_vec();
        let mut last: Option<f64> = None;
        for s in &r.trace.solutions[10..] {
            pop.push(s.clone());
            let out = sms_removal(&objectives(&pop), &spec.hv_ref).unwrap();
            pop.remove(out);
            let single_front = fast_nondominated_sort(&objectives(&pop)).len() == 1;
            let hv = hypervolume_2d(&objectives(&pop), &spec.hv_ref).unwrap();
            if let (true, Some(prev)) = (single_front, last) {
                assert!(hv >= prev - 1e-12, "{hv} < {prev}");
            }
            last = single_front.then_some(hv);
        }
        assert_eq!(pop, r.final_population);
    }
}
