//! Objective-space points, Pareto dominance and nondominated filtering.
//!
//! All objectives are minimized. Comparisons are exact on `f64`; there is no
//! epsilon, so dominance stays a strict partial order.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in `R^M` objective space, `M >= 2`, with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewObjectives(values.len()));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dominates(&self, other: &Self) -> Result<bool> {
        dominates(self, other)
    }

    pub fn weakly_dominates(&self, other: &Self) -> Result<bool> {
        weakly_dominates(self, other)
    }

    /// Euclidean distance.
    pub fn distance(&self, other: &Self) -> f64 {
        euclidean(&self.0, &other.0)
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(v: ObjectiveVector) -> Self {
        v.0
    }
}

impl Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ObjectiveVector").field(&self.0).finish()
    }
}

fn check_dims(u: &ObjectiveVector, v: &ObjectiveVector) -> Result<()> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: v.dim(),
        });
    }
    Ok(())
}

/// `u ≺ v`: no worse in every objective and strictly better in at least one.
pub fn dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> Result<bool> {
    check_dims(u, v)?;
    Ok(dominates_slice(u.values(), v.values()))
}

/// `u ⪯ v`: no worse in every objective.
pub fn weakly_dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> Result<bool> {
    check_dims(u, v)?;
    Ok(weakly_dominates_slice(u.values(), v.values()))
}

pub(crate) fn dominates_slice(u: &[f64], v: &[f64]) -> bool {
    debug_assert_eq!(u.len(), v.len());
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a > b {
            return false;
        }
        if a < b {
            strict = true;
        }
    }
    strict
}

pub(crate) fn weakly_dominates_slice(u: &[f64], v: &[f64]) -> bool {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).all(|(a, b)| a <= b)
}

pub(crate) fn euclidean(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Indices of the nondominated members of `points`, in input order.
///
/// Exact duplicates collapse onto their first occurrence.
pub fn nondominated_indices<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<usize>> {
    let Some(first) = points.first() else {
        return Ok(Vec::new());
    };
    let dim = first.as_ref().len();
    if let Some(bad) = points.iter().find(|p| p.as_ref().len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.as_ref().len(),
        });
    }

    // A dominator always precedes its victim in lexicographic order, and the
    // stable sort puts the first of any duplicate group in front.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lex_cmp(points[i].as_ref(), points[j].as_ref()));

    let mut kept: Vec<usize> = Vec::new();
    if dim == 2 {
        let mut best_f2 = f64::INFINITY;
        for &i in &order {
            let f2 = points[i].as_ref()[1];
            if f2 < best_f2 {
                best_f2 = f2;
                kept.push(i);
            }
        }
    } else {
        for &i in &order {
            let p = points[i].as_ref();
            if !kept
                .iter()
                .any(|&k| weakly_dominates_slice(points[k].as_ref(), p))
            {
                kept.push(i);
            }
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

/// The nondominated subset of `set`, in input order, one representative per
/// duplicate group.
pub fn nondominated_filter(set: &[ObjectiveVector]) -> Result<Vec<ObjectiveVector>> {
    let idx = nondominated_indices(set)?;
    Ok(idx.into_iter().map(|i| set[i].clone()).collect())
}

impl AsRef<[f64]> for ObjectiveVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}
