//! Trace-producing optimizers. Every evaluation is appended to the run's
//! trace; a run stops exactly at its evaluation budget.
//!
//! All randomness comes from a `ChaCha8Rng` seeded with the config seed.

mod midea;
mod mo_cma_es;
mod nsga2;
mod sms_emoa;
pub mod sorting;
pub mod variation;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::ProblemSpec;
use crate::trace::{EvaluationTrace, Solution};

pub use midea::{leader_clusters, midea_select, run_naive_midea, MideaParams};
pub use mo_cma_es::{run_mo_cma_es, CmaConstants, CmaState, DimensionBasis, MoCmaParams};
pub use nsga2::{run_nsga2, run_scd_nsga2};
pub use sms_emoa::run_sms_emoa;
pub use sorting::{crowding_distance, fast_nondominated_sort, scd_truncate, sms_removal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmId {
    #[serde(rename = "NSGA2")]
    Nsga2,
    #[serde(rename = "SCD_NSGA2")]
    ScdNsga2,
    #[serde(rename = "SMS_EMOA")]
    SmsEmoa,
    #[serde(rename = "NAIVE_MIDEA")]
    NaiveMidea,
    #[serde(rename = "MO_CMA_ES")]
    MoCmaEs,
    #[serde(rename = "MONEDA")]
    Moneda,
    #[serde(rename = "MARTEDA")]
    Marteda,
    #[serde(rename = "PSEMOA")]
    Psemoa,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 8] = [
        Self::Nsga2,
        Self::ScdNsga2,
        Self::SmsEmoa,
        Self::NaiveMidea,
        Self::MoCmaEs,
        Self::Moneda,
        Self::Marteda,
        Self::Psemoa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Nsga2 => "NSGA2",
            Self::ScdNsga2 => "SCD_NSGA2",
            Self::SmsEmoa => "SMS_EMOA",
            Self::NaiveMidea => "NAIVE_MIDEA",
            Self::MoCmaEs => "MO_CMA_ES",
            Self::Moneda => "MONEDA",
            Self::Marteda => "MARTEDA",
            Self::Psemoa => "PSEMOA",
        }
    }

    pub fn is_implemented(self) -> bool {
        !matches!(self, Self::Moneda | Self::Marteda | Self::Psemoa)
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| Error::Unknown(format!("algorithm {s}")))
    }
}

/// Operator parameters shared by the GA-style optimizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariationParams {
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    /// `None` means `1/n`.
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self { crossover_prob: 0.9, crossover_eta: 20.0, mutation_prob: None, mutation_eta: 20.0 }
    }
}

impl VariationParams {
    fn mutation_prob_for(&self, n: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / n as f64)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorParams {
    pub variation: VariationParams,
    pub midea: MideaParams,
    pub mo_cma: MoCmaParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub algorithm: AlgorithmId,
    pub mu: usize,
    pub budget: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: OperatorParams,
}

impl OptimizerConfig {
    pub fn new(algorithm: AlgorithmId, mu: usize, budget: usize, seed: u64) -> Self {
        Self { algorithm, mu, budget, seed, params: OperatorParams::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu < 2 {
            return Err(Error::InvalidParameter(format!("mu = {} < 2", self.mu)));
        }
        if self.budget < self.mu {
            return Err(Error::InvalidParameter(format!("budget {} < mu {}", self.budget, self.mu)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trace: EvaluationTrace,
    pub final_population: Vec<Solution>,
    /// Seconds.
    pub wall_time: f64,
}

/// Runs the configured algorithm.
pub fn run(spec: &ProblemSpec, cfg: &OptimizerConfig) -> Result<RunResult> {
    match cfg.algorithm {
        AlgorithmId::Nsga2 => run_nsga2(spec, cfg),
        AlgorithmId::ScdNsga2 => run_scd_nsga2(spec, cfg),
        AlgorithmId::SmsEmoa => run_sms_emoa(spec, cfg),
        AlgorithmId::NaiveMidea => run_naive_midea(spec, cfg),
        AlgorithmId::MoCmaEs => run_mo_cma_es(spec, cfg),
        other => Err(Error::NotImplemented(other.to_string())),
    }
}

/// Budget-aware evaluation that records into the trace.
struct Evaluator<'a> {
    spec: &'a ProblemSpec,
    trace: EvaluationTrace,
    budget: usize,
    started: Instant,
}

impl<'a> Evaluator<'a> {
    fn new(spec: &'a ProblemSpec, cfg: &OptimizerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            spec,
            trace: EvaluationTrace::new(spec.id.as_str(), cfg.seed),
            budget: cfg.budget,
            started: Instant::now(),
        })
    }

    fn remaining(&self) -> usize {
        self.budget - self.trace.len()
    }

    fn evaluate(&mut self, mut x: Vec<f64>) -> Result<Solution> {
        debug_assert!(self.remaining() > 0);
        self.spec.clip(&mut x);
        let f = self.spec.evaluate(&x)?;
        Ok(self.trace.record(x, f).clone())
    }

    fn initial_population(&mut self, rng: &mut ChaCha8Rng, mu: usize) -> Result<Vec<Solution>> {
        (0..mu)
            .map(|_| {
                let x = variation::uniform_point(rng, &self.spec.lower, &self.spec.upper);
                self.evaluate(x)
            })
            .collect()
    }

    fn finish(self, final_population: Vec<Solution>) -> RunResult {
        RunResult {
            trace: self.trace,
            final_population,
            wall_time: self.started.elapsed().as_secs_f64(),
        }
    }
}

fn rng_for(cfg: &OptimizerConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn objectives(pop: &[Solution]) -> Vec<&[f64]> {
    pop.iter().map(Solution::objectives).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemId;

    #[test]
    fn algorithm_ids_round_trip() {
        for a in AlgorithmId::ALL {
            assert_eq!(a.as_str().parse::<AlgorithmId>().unwrap(), a);
            let json = serde_json::to_string(&a).unwrap();
            assert_eq!(json, format!("\"{}\"", a.as_str()));
        }
        assert_eq!("mo-cma-es".parse::<AlgorithmId>().unwrap(), AlgorithmId::MoCmaEs);
        assert!("SPEA2".parse::<AlgorithmId>().is_err());
    }

    #[test]
    fn config_validation() {
        let spec = ProblemSpec::new(ProblemId::Sphere);
        let bad = OptimizerConfig::new(AlgorithmId::Nsga2, 1, 10, 0);
        assert!(run(&spec, &bad).is_err());
        let bad = OptimizerConfig::new(AlgorithmId::Nsga2, 10, 9, 0);
        assert!(run(&spec, &bad).is_err());
    }

    #[test]
    fn reserved_algorithms_are_not_implemented() {
        let spec = ProblemSpec::new(ProblemId::Sphere);
        for a in [AlgorithmId::Moneda, AlgorithmId::Marteda, AlgorithmId::Psemoa] {
            let cfg = OptimizerConfig::new(a, 10, 100, 0);
            assert!(matches!(run(&spec, &cfg), Err(Error::NotImplemented(_))));
        }
    }

    #[test]
    fn config_json_defaults() {
        let cfg: OptimizerConfig =
            serde_json::from_str(r#"{"algorithm":"NAIVE_MIDEA","mu":20,"budget":100,"seed":3}"#).unwrap();
        assert_eq!(cfg.params, OperatorParams::default());
        assert_eq!(cfg.params.midea.tau, 0.3);
    }

    #[test]
    fn contracts_hold_for_every_algorithm_and_problem() {
        for id in ProblemId::ALL {
            let spec = ProblemSpec::new(id);
            for a in AlgorithmId::ALL.into_iter().filter(|a| a.is_implemented()) {
                for budget in [10, 10 + 7, 203] {
                    let cfg = OptimizerConfig::new(a, 10, budget, 11);
                    let r = run(&spec, &cfg).unwrap();
                    assert_eq!(r.trace.len(), budget, "{a} on {id}");
                    r.trace.validate().unwrap();
                    assert!(r.trace.solutions.iter().all(|s| spec.contains(&s.x)), "{a} on {id}");
                    assert_eq!(r.final_population.len(), 10, "{a} on {id}");
                    for s in &r.final_population {
                        assert_eq!(&r.trace.solutions[s.eval_index], s, "{a} on {id}");
                    }
                    if budget == 10 {
                        assert_eq!(r.final_population, r.trace.solutions);
                    }
                    let again = run(&spec, &cfg).unwrap();
                    assert_eq!(again.trace, r.trace, "{a} on {id} not deterministic");
                }
            }
        }
    }
}
