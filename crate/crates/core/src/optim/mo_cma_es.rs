//! μ×(1+1)-MO-CMA-ES. Each parent owns a step size, a smoothed success
//! rate, an evolution path and a covariance matrix; offspring success means
//! surviving the (μ+λ) hypervolume-based selection.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::sorting::hv_select;
use super::{objectives, rng_for, Evaluator, OptimizerConfig, RunResult};
use crate::error::Result;
use crate::problems::ProblemSpec;
use crate::trace::Solution;

/// Which size the learning-rate formulas are expressed in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionBasis {
    /// Search-space dimension `n`.
    #[default]
    Dimension,
    /// Population size `μ`.
    PopulationSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MoCmaParams {
    pub sigma0: f64,
    pub basis: DimensionBasis,
    pub target_success: f64,
    pub threshold_success: f64,
    /// Success-rate averaging `c_p`; `None` means `p_target / (2 + p_target)`.
    pub success_averaging: Option<f64>,
}

impl Default for MoCmaParams {
    fn default() -> Self {
        Self {
            sigma0: 1.0,
            basis: DimensionBasis::Dimension,
            target_success: 0.181,
            threshold_success: 0.44,
            success_averaging: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmaConstants {
    pub damping: f64,
    pub p_target: f64,
    pub c_p: f64,
    pub c_c: f64,
    pub c_cov: f64,
    pub p_thresh: f64,
}

impl CmaConstants {
    pub fn new(params: &MoCmaParams, n: usize, mu: usize) -> Self {
        let b = match params.basis {
            DimensionBasis::Dimension => n,
            DimensionBasis::PopulationSize => mu,
        } as f64;
        let p_target = params.target_success;
        Self {
            damping: 1.0 + b / 2.0,
            p_target,
            c_p: params.success_averaging.unwrap_or(p_target / (2.0 + p_target)),
            c_c: 2.0 / (b + 2.0),
            c_cov: 2.0 / (b * b + 6.0),
            p_thresh: params.threshold_success,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmaState {
    pub sigma: f64,
    pub p_succ: f64,
    pub p_c: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl CmaState {
    pub fn new(n: usize, sigma: f64, k: &CmaConstants) -> Self {
        Self {
            sigma,
            p_succ: k.p_target,
            p_c: DVector::zeros(n),
            cov: DMatrix::identity(n, n),
        }
    }

    /// Smooths the success rate with indicator `success ∈ [0, 1]` and moves σ
    /// up when the rate exceeds the target, down otherwise.
    pub fn update_step_size(&mut self, success: f64, k: &CmaConstants) {
        self.p_succ = (1.0 - k.c_p) * self.p_succ + k.c_p * success;
        self.sigma *= ((self.p_succ - k.p_target) / (k.damping * (1.0 - k.p_target))).exp();
    }

    /// Rank-one update with the step `x_step = (x' − x) / σ_parent`. Above the
    /// threshold success rate the path only decays.
    pub fn update_covariance(&mut self, x_step: &DVector<f64>, k: &CmaConstants) {
        if self.p_succ < k.p_thresh {
            self.p_c = &self.p_c * (1.0 - k.c_c) + x_step * (k.c_c * (2.0 - k.c_c)).sqrt();
            let outer = &self.p_c * self.p_c.transpose();
            self.cov = &self.cov * (1.0 - k.c_cov) + outer * k.c_cov;
        } else {
            self.p_c *= 1.0 - k.c_c;
            let outer = &self.p_c * self.p_c.transpose();
            let keep = &self.cov * (k.c_c * (2.0 - k.c_c));
            self.cov = &self.cov * (1.0 - k.c_cov) + (outer + keep) * k.c_cov;
        }
    }

    /// Lower Cholesky factor, resetting the covariance to the identity when
    /// it is no longer positive definite.
    fn factor(&mut self) -> DMatrix<f64> {
        if let Some(ch) = self.cov.clone().cholesky() {
            return ch.l();
        }
        log::warn!("covariance lost positive definiteness; reset to identity");
        let n = self.cov.nrows();
        self.cov = DMatrix::identity(n, n);
        self.p_c = DVector::zeros(n);
        self.cov.clone()
    }
}

pub fn run_mo_cma_es(spec: &ProblemSpec, cfg: &OptimizerConfig) -> Result<RunResult> {
    let mut eval = Evaluator::new(spec, cfg)?;
    let mut rng = rng_for(cfg);
    let par = &cfg.params.mo_cma;
    let k = CmaConstants::new(par, spec.n, cfg.mu);
    let init = eval.initial_population(&mut rng, cfg.mu)?;
    let mut pop: Vec<(Solution, CmaState)> =
        init.into_iter().map(|s| (s, CmaState::new(spec.n, par.sigma0, &k))).collect();

    while eval.remaining() > 0 {
        let lambda = cfg.mu.min(eval.remaining());
        let mut offspring = Vec::with_capacity(lambda);
        for (parent, state) in pop.iter_mut().take(lambda) {
            let l = state.factor();
            let z = DVector::from_fn(spec.n, |_, _| StandardNormal.sample(&mut rng));
            let y = l * z;
            let x: Vec<f64> = parent.x.iter().zip(y.iter()).map(|(a, b)| a + state.sigma * b).collect();
            let child = eval.evaluate(x)?;
            // the step is taken after clipping so the path sees the real move
            let step = DVector::from_iterator(
                spec.n,
                child.x.iter().zip(&parent.x).map(|(c, p)| (c - p) / state.sigma),
            );
            offspring.push((child, state.clone(), step));
        }

        let q: Vec<&Solution> = pop.iter().map(|p| &p.0).chain(offspring.iter().map(|o| &o.0)).collect();
        let q_objs: Vec<&[f64]> = q.iter().map(|s| s.objectives()).collect();
        let keep = hv_select(&q_objs, cfg.mu, &spec.hv_ref)?;
        let mu = pop.len();
        let mut survived = vec![false; mu + lambda];
        for &i in &keep {
            survived[i] = true;
        }

        let mut all: Vec<(Solution, CmaState)> = Vec::with_capacity(mu + lambda);
        let mut parents = pop;
        for (i, (child, mut state, step)) in offspring.into_iter().enumerate() {
            let succ = if survived[mu + i] { 1.0 } else { 0.0 };
            parents[i].1.update_step_size(succ, &k);
            state.update_step_size(succ, &k);
            state.update_covariance(&step, &k);
            all.push((child, state));
        }
        let mut merged: Vec<(Solution, CmaState)> = parents;
        merged.extend(all);
        pop = merged
            .into_iter()
            .enumerate()
            .filter(|(i, _)| survived[*i])
            .map(|(_, p)| p)
            .collect();
    }
    let final_pop: Vec<Solution> = pop.into_iter().map(|p| p.0).collect();
    debug_assert_eq!(objectives(&final_pop).len(), cfg.mu);
    Ok(eval.finish(final_pop))
}
