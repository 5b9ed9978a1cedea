//! Naive MIDEA: truncation selection with diversity preservation, leader
//! clustering in objective space, and a fully factorized Gaussian per
//! cluster.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{rng_for, Evaluator, OptimizerConfig, RunResult};
use crate::error::Result;
use crate::pareto::{dominates_slice, euclidean};
use crate::problems::ProblemSpec;
use crate::trace::Solution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MideaParams {
    /// Selection percentile.
    pub tau: f64,
    /// Diversity percentile, in percent of `μ`.
    pub delta: f64,
    /// Parents per variable. The univariate model has none, so this is unused.
    pub kappa: usize,
    /// `None` means `⌈0.5⌊τμ⌋⌉`.
    pub max_clusters: Option<usize>,
    pub leader_threshold: f64,
    /// Variance floor as a fraction of the squared variable range.
    pub variance_floor: f64,
}

impl Default for MideaParams {
    fn default() -> Self {
        Self {
            tau: 0.3,
            delta: 15.0,
            kappa: 2,
            max_clusters: None,
            leader_threshold: 0.1,
            variance_floor: 1e-10,
        }
    }
}

impl MideaParams {
    pub fn selection_size(&self, mu: usize) -> usize {
        ((self.tau * mu as f64).floor() as usize).clamp(1, mu - 1)
    }

    pub fn preselection_size(&self, mu: usize) -> usize {
        let extra = (self.delta / 100.0 * mu as f64).ceil() as usize;
        (self.selection_size(mu) + extra).min(mu)
    }

    pub fn cluster_cap(&self, mu: usize) -> usize {
        self.max_clusters
            .unwrap_or_else(|| (0.5 * self.selection_size(mu) as f64).ceil() as usize)
            .max(1)
    }
}

/// Picks `n_select` indices: rank by domination count, keep the best
/// `n_preselect` (plus anyone tied with the last of them), then choose
/// greedily by farthest-point distance in normalized objective space,
/// starting from the best point in a randomly chosen objective.
pub fn midea_select<P: AsRef<[f64]>, R: Rng + ?Sized>(
    points: &[P],
    n_select: usize,
    n_preselect: usize,
    rng: &mut R,
) -> Vec<usize> {
    let n = points.len();
    let count: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| dominates_slice(points[j].as_ref(), points[i].as_ref())).count())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| count[i]);
    let cut = count[order[n_preselect.clamp(1, n) - 1]];
    let candidates: Vec<usize> = order.into_iter().take_while(|&i| count[i] <= cut).collect();
    if candidates.len() <= n_select {
        let mut c = candidates;
        c.sort_unstable();
        return c;
    }

    let norm = normalized(&candidates.iter().map(|&i| points[i].as_ref()).collect::<Vec<_>>());
    let m = norm[0].len();
    let obj = rng.random_range(0..m);
    let first = (0..candidates.len())
        .min_by(|&a, &b| norm[a][obj].total_cmp(&norm[b][obj]))
        .expect("nonempty");
    let mut chosen = vec![first];
    let mut gap: Vec<f64> = norm.iter().map(|q| euclidean(q, &norm[first])).collect();
    while chosen.len() < n_select {
        let mut best = usize::MAX;
        for k in 0..candidates.len() {
            if !chosen.contains(&k) && (best == usize::MAX || gap[k] > gap[best]) {
                best = k;
            }
        }
        chosen.push(best);
        for k in 0..candidates.len() {
            gap[k] = gap[k].min(euclidean(&norm[k], &norm[best]));
        }
    }
    let mut out: Vec<usize> = chosen.into_iter().map(|k| candidates[k]).collect();
    out.sort_unstable();
    out
}

/// Leader clustering in objective space normalized to the set's bounding box.
/// Points are visited in order; a point joins its nearest leader when within
/// `threshold`, otherwise founds a new cluster while fewer than `max_clusters`
/// exist.
pub fn leader_clusters<P: AsRef<[f64]>>(points: &[P], threshold: f64, max_clusters: usize) -> Vec<Vec<usize>> {
    if points.is_empty() {
        return Vec::new();
    }
    let norm = normalized(points);
    let mut leaders: Vec<usize> = Vec::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, q) in norm.iter().enumerate() {
        let nearest = leaders
            .iter()
            .enumerate()
            .map(|(c, &l)| (c, euclidean(q, &norm[l])))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((c, d)) if d <= threshold || clusters.len() >= max_clusters.max(1) => clusters[c].push(i),
            _ => {
                leaders.push(i);
                clusters.push(vec![i]);
            }
        }
    }
    clusters
}

fn normalized<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<f64>> {
    let m = points[0].as_ref().len();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in points {
        for (j, v) in p.as_ref().iter().enumerate() {
            lo[j] = lo[j].min(*v);
            hi[j] = hi[j].max(*v);
        }
    }
    points
        .iter()
        .map(|p| {
            p.as_ref()
                .iter()
                .enumerate()
                .map(|(j, v)| if hi[j] > lo[j] { (v - lo[j]) / (hi[j] - lo[j]) } else { 0.0 })
                .collect()
        })
        .collect()
}

struct Gaussian {
    mean: Vec<f64>,
    sd: Vec<f64>,
}

impl Gaussian {
    fn fit(members: &[&Solution], spec: &ProblemSpec, floor: f64) -> Self {
        let k = members.len() as f64;
        let mut mean = vec![0.0; spec.n];
        for s in members {
            for (m, v) in mean.iter_mut().zip(&s.x) {
                *m += v / k;
            }
        }
        let sd = (0..spec.n)
            .map(|j| {
                let var = members.iter().map(|s| (s.x[j] - mean[j]).powi(2)).sum::<f64>() / k;
                let range = spec.upper[j] - spec.lower[j];
                var.max(floor * range * range).sqrt()
            })
            .collect();
        Self { mean, sd }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.sd)
            .map(|(m, s)| {
                let z: f64 = StandardNormal.sample(rng);
                m + s * z
            })
            .collect()
    }
}

pub fn run_naive_midea(spec: &ProblemSpec, cfg: &OptimizerConfig) -> Result<RunResult> {
    let mut eval = Evaluator::new(spec, cfg)?;
    let mut rng = rng_for(cfg);
    let par = &cfg.params.midea;
    let n_sel = par.selection_size(cfg.mu);
    let n_pre = par.preselection_size(cfg.mu);
    let cap = par.cluster_cap(cfg.mu);
    let mut pop = eval.initial_population(&mut rng, cfg.mu)?;

    while eval.remaining() > 0 {
        let objs: Vec<&[f64]> = pop.iter().map(Solution::objectives).collect();
        let sel = midea_select(&objs, n_sel, n_pre, &mut rng);
        let sel_objs: Vec<&[f64]> = sel.iter().map(|&i| objs[i]).collect();
        let clusters = leader_clusters(&sel_objs, par.leader_threshold, cap);
        let models: Vec<Gaussian> = clusters
            .iter()
            .map(|c| {
                let members: Vec<&Solution> = c.iter().map(|&k| &pop[sel[k]]).collect();
                Gaussian::fit(&members, spec, par.variance_floor)
            })
            .collect();

        let lambda = (cfg.mu - sel.len()).min(eval.remaining());
        let mut next: Vec<Solution> = sel.iter().map(|&i| pop[i].clone()).collect();
        for _ in 0..lambda {
            // cluster chosen with probability proportional to its size
            let mut pick = rng.random_range(0..sel.len());
            let mut c = 0;
            while pick >= clusters[c].len() {
                pick -= clusters[c].len();
                c += 1;
            }
            next.push(eval.evaluate(models[c].sample(&mut rng))?);
        }
        if next.len() < cfg.mu {
            // budget ran out mid-generation: top up with the best unselected
            // members of the previous population
            let mut rest: Vec<usize> = (0..pop.len()).filter(|i| !sel.contains(i)).collect();
            let count = |i: usize| (0..pop.len()).filter(|&j| dominates_slice(objs[j], objs[i])).count();
            rest.sort_by_cached_key(|&i| count(i));
            let need = cfg.mu - next.len();
            next.extend(rest.into_iter().take(need).map(|i| pop[i].clone()));
        }
        pop = next;
    }
    Ok(eval.finish(pop))
}
