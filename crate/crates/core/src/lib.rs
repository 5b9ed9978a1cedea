//! Multiobjective optimizers that trace every evaluation, and an offline
//! averaged-Hausdorff (Δ_p) archive that extracts evenly spread
//! nondominated subsets from those traces.

pub mod archive;
pub mod error;
pub mod harness;
pub mod indicators;
pub mod optim;
pub mod pareto;
pub mod problems;
pub mod reffront;
pub mod trace;

pub use error::{Error, Result};
pub use pareto::{dominates, nondominated_filter, weakly_dominates, ObjectiveVector};
pub use trace::{EvaluationTrace, Solution};
