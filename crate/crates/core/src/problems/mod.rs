//! Bi-objective benchmark problems: SPHERE, DENT, ZDT3 and WFG1.
//!
//! Formulas:
//! - SPHERE (`n = 2`, `x ∈ [-2, 2]^2`): `f1 = |x|^2`, `f2 = |x - (1,1)|^2`.
//! - DENT (`n = 2`, `x ∈ [-2, 2]^2`):
//!   `f1,2 = ½(√(1+(x1+x2)²) + √(1+(x1−x2)²) ± (x1−x2)) + 0.85·exp(−(x1−x2)²)`.
//! - ZDT3 with 20 variables in `[0, 1]` (the canonical suite uses 30).
//! - WFG1 with 2 position and 4 distance parameters, `z_i ∈ [0, 2i]`.

mod front;
mod wfg;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::ObjectiveVector;

pub use front::{
    true_front_points, true_front_points_with_grid, zdt3_front_segments, ParametricFront,
    WFG1_GRID_PER_PARAMETER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProblemId {
    Sphere,
    Dent,
    Zdt3,
    Wfg1,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [Self::Sphere, Self::Dent, Self::Zdt3, Self::Wfg1];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sphere => "SPHERE",
            Self::Dent => "DENT",
            Self::Zdt3 => "ZDT3",
            Self::Wfg1 => "WFG1",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown(format!("problem {s}")))
    }
}

const ZDT3_N: usize = 20;
const WFG1_K: usize = 2;
const WFG1_L: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub id: ProblemId,
    pub n: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Fixed hypervolume reference point.
    pub hv_ref: ObjectiveVector,
}

impl ProblemSpec {
    pub fn new(id: ProblemId) -> Self {
        let (lower, upper, hv_ref) = match id {
            ProblemId::Sphere => (vec![-2.0; 2], vec![2.0; 2], [4.0, 4.0]),
            ProblemId::Dent => (vec![-2.0; 2], vec![2.0; 2], [5.0, 5.0]),
            ProblemId::Zdt3 => (vec![0.0; ZDT3_N], vec![1.0; ZDT3_N], [1.0, 7.0]),
            ProblemId::Wfg1 => {
                let n = WFG1_K + WFG1_L;
                (vec![0.0; n], (1..=n).map(|i| 2.0 * i as f64).collect(), [3.0, 5.0])
            }
        };
        Self {
            id,
            n: lower.len(),
            lower,
            upper,
            hv_ref: ObjectiveVector::new(hv_ref.to_vec()).expect("finite constants"),
        }
    }

    pub fn num_objectives(&self) -> usize {
        2
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<ObjectiveVector> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: x.len() });
        }
        let f = match self.id {
            ProblemId::Sphere => sphere(x),
            ProblemId::Dent => dent(x),
            ProblemId::Zdt3 => zdt3(x),
            ProblemId::Wfg1 => wfg::wfg1(x, WFG1_K),
        };
        ObjectiveVector::new(f.to_vec())
    }

    pub fn clip(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    /// Analytic parameterization of the Pareto front over `t ∈ [0, 1]`, with
    /// the parameter intervals that are actually nondominated. `None` for WFG1.
    pub fn front_param(&self) -> Option<ParametricFront> {
        front::parametric_front(self.id)
    }
}

fn sphere(x: &[f64]) -> [f64; 2] {
    let f1 = x.iter().map(|v| v * v).sum();
    let f2 = x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum();
    [f1, f2]
}

pub(crate) fn dent_on_front(t: f64) -> [f64; 2] {
    // x1 = -x2, t = x1 - x2
    let base = 0.5 * (1.0 + (1.0 + t * t).sqrt());
    let d = 0.85 * (-t * t).exp();
    [base + 0.5 * t + d, base - 0.5 * t + d]
}

fn dent(x: &[f64]) -> [f64; 2] {
    let (s, t) = (x[0] + x[1], x[0] - x[1]);
    let base = 0.5 * ((1.0 + s * s).sqrt() + (1.0 + t * t).sqrt());
    let d = 0.85 * (-t * t).exp();
    [base + 0.5 * t + d, base - 0.5 * t + d]
}

pub(crate) fn zdt3_f2(f1: f64, g: f64) -> f64 {
    let r = f1 / g;
    g * (1.0 - r.sqrt() - r * (10.0 * PI * f1).sin())
}

fn zdt3(x: &[f64]) -> [f64; 2] {
    let f1 = x[0];
    let tail: f64 = x[1..].iter().sum();
    let g = 1.0 + 9.0 * tail / (x.len() - 1) as f64;
    [f1, zdt3_f2(f1, g)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::dominates_slice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_at_origin() {
        let p = ProblemSpec::new(ProblemId::Sphere);
        assert_eq!(p.evaluate(&[0.0, 0.0]).unwrap().values(), &[0.0, 2.0]);
    }

    #[test]
    fn zdt3_at_corners() {
        let p = ProblemSpec::new(ProblemId::Zdt3);
        let mut x = vec![0.0; 20];
        assert_eq!(p.evaluate(&x).unwrap().values(), &[0.0, 1.0]);
        x[0] = 1.0;
        let f = p.evaluate(&x).unwrap();
        assert_eq!(f[0], 1.0);
        assert!(f[1].abs() < 1e-14, "sin(10π) rounding only: {}", f[1]);
    }

    #[test]
    fn dent_matches_direct_formula() {
        let p = ProblemSpec::new(ProblemId::Dent);
        let (x1, x2) = (0.3f64, -1.1f64);
        let d = 0.85 * (-(x1 - x2).powi(2)).exp();
        let a = (1.0 + (x1 + x2).powi(2)).sqrt() + (1.0 + (x1 - x2).powi(2)).sqrt();
        let f = p.evaluate(&[x1, x2]).unwrap();
        assert!((f[0] - (0.5 * (a + x1 - x2) + d)).abs() < 1e-15);
        assert!((f[1] - (0.5 * (a - x1 + x2) + d)).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let p = ProblemSpec::new(ProblemId::Zdt3);
        assert!(matches!(p.evaluate(&[0.0; 3]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn parse_ids() {
        assert_eq!("zdt3".parse::<ProblemId>().unwrap(), ProblemId::Zdt3);
        assert_eq!("WFG1".parse::<ProblemId>().unwrap(), ProblemId::Wfg1);
        assert!("ZDT1".parse::<ProblemId>().is_err());
    }

    #[test]
    fn random_points_are_finite_deterministic_and_within_hv_box_at_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for id in ProblemId::ALL {
            let p = ProblemSpec::new(id);
            assert!(p.lower.iter().zip(&p.upper).all(|(l, u)| l < u));
            for _ in 0..1000 {
                let x: Vec<f64> = p.lower.iter().zip(&p.upper).map(|(l, u)| rng.random_range(*l..=*u)).collect();
                let f = p.evaluate(&x).unwrap();
                assert_eq!(f, p.evaluate(&x).unwrap());
                assert!(f.values().iter().all(|v| v.is_finite()));
            }
        }
    }

    #[test]
    fn random_points_never_dominate_the_true_front() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for id in [ProblemId::Sphere, ProblemId::Dent, ProblemId::Zdt3] {
            let p = ProblemSpec::new(id);
            let front = true_front_points(&p, 1000).unwrap();
            for _ in 0..1000 {
                let x: Vec<f64> = p.lower.iter().zip(&p.upper).map(|(l, u)| rng.random_range(*l..=*u)).collect();
                let f = p.evaluate(&x).unwrap();
                let shifted: Vec<f64> = f.values().iter().map(|v| v + 1e-9).collect();
                for q in &front {
                    assert!(!dominates_slice(&shifted, q.values()), "{id}: {f:?} dominates {q:?}");
                }
            }
        }
    }

    #[test]
    fn clip_respects_bounds() {
        let p = ProblemSpec::new(ProblemId::Wfg1);
        let mut x = vec![-1.0, 5.0, 3.0, 100.0, 0.5, -0.1];
        p.clip(&mut x);
        assert_eq!(x, vec![0.0, 4.0, 3.0, 8.0, 0.5, 0.0]);
        assert!(p.contains(&x));
    }
}
