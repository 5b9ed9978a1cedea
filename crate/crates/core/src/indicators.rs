//! Distance-based quality indicators (GD_p, IGD_p and the averaged Hausdorff
//! distance Δ_p) and the bi-objective dominated hypervolume.
//!
//! `d(u, B)` is the Euclidean distance from `u` to its nearest member of `B`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::{euclidean, nondominated_indices, ObjectiveVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndicatorName {
    #[serde(rename = "GD_p")]
    GdP,
    #[serde(rename = "IGD_p")]
    IgdP,
    #[serde(rename = "Delta_p")]
    DeltaP,
    #[serde(rename = "HV")]
    Hv,
}

impl IndicatorName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GdP => "GD_p",
            Self::IgdP => "IGD_p",
            Self::DeltaP => "Delta_p",
            Self::Hv => "HV",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "GD_p" => Ok(Self::GdP),
            "IGD_p" => Ok(Self::IgdP),
            "Delta_p" => Ok(Self::DeltaP),
            "HV" => Ok(Self::Hv),
            other => Err(Error::Unknown(other.to_string())),
        }
    }
}

impl fmt::Display for IndicatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorValue {
    pub name: IndicatorName,
    /// Absent for HV.
    pub p: Option<f64>,
    pub value: f64,
}

/// Δ_p together with both of its components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaP {
    pub value: f64,
    pub gd: f64,
    pub igd: f64,
}

impl DeltaP {
    pub fn indicator_values(&self, p: f64) -> [IndicatorValue; 3] {
        [
            IndicatorValue { name: IndicatorName::DeltaP, p: Some(p), value: self.value },
            IndicatorValue { name: IndicatorName::GdP, p: Some(p), value: self.gd },
            IndicatorValue { name: IndicatorName::IgdP, p: Some(p), value: self.igd },
        ]
    }
}

pub(crate) fn nearest_distance<P: AsRef<[f64]>>(u: &[f64], set: &[P]) -> f64 {
    set.iter()
        .map(|v| euclidean(u, v.as_ref()))
        .fold(f64::INFINITY, f64::min)
}

/// `((1/n) Σ d^p)^{1/p}` over `n` distances, accumulated in iteration order.
pub(crate) fn power_mean(distances: impl Iterator<Item = f64>, n: usize, p: f64) -> f64 {
    let sum: f64 = distances.map(|d| d.powf(p)).sum();
    (sum / n as f64).powf(1.0 / p)
}

fn check_inputs<P: AsRef<[f64]>, Q: AsRef<[f64]>>(a: &[P], b: &[Q], p: f64) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("indicator sets must be nonempty"));
    }
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    let dim = a[0].as_ref().len();
    for v in a.iter().map(AsRef::as_ref).chain(b.iter().map(AsRef::as_ref)) {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
        }
    }
    Ok(())
}

/// Generational distance `GD_p(A, B)`.
pub fn gd_p<P: AsRef<[f64]>, Q: AsRef<[f64]>>(a: &[P], b: &[Q], p: f64) -> Result<f64> {
    check_inputs(a, b, p)?;
    Ok(power_mean(
        a.iter().map(|u| nearest_distance(u.as_ref(), b)),
        a.len(),
        p,
    ))
}

/// Inverted generational distance, `IGD_p(A, B) = GD_p(B, A)`.
pub fn igd_p<P: AsRef<[f64]>, Q: AsRef<[f64]>>(a: &[P], b: &[Q], p: f64) -> Result<f64> {
    gd_p(b, a, p)
}

/// Averaged Hausdorff distance `Δ_p(A, B) = max(GD_p(A, B), IGD_p(A, B))`.
pub fn delta_p<P: AsRef<[f64]>, Q: AsRef<[f64]>>(a: &[P], b: &[Q], p: f64) -> Result<DeltaP> {
    let gd = gd_p(a, b, p)?;
    let igd = igd_p(a, b, p)?;
    Ok(DeltaP { value: gd.max(igd), gd, igd })
}

fn check_ref_2d(reference: &ObjectiveVector) -> Result<()> {
    if reference.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: reference.dim() });
    }
    Ok(())
}

/// Area dominated by `set` and bounded by `reference`. Points that are not
/// strictly below `reference` in both objectives are ignored.
pub fn hypervolume_2d<P: AsRef<[f64]>>(set: &[P], reference: &ObjectiveVector) -> Result<f64> {
    check_ref_2d(reference)?;
    let (r1, r2) = (reference[0], reference[1]);
    let mut inside: Vec<[f64; 2]> = Vec::with_capacity(set.len());
    for v in set {
        let v = v.as_ref();
        if v.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: v.len() });
        }
        if v[0] < r1 && v[1] < r2 {
            inside.push([v[0], v[1]]);
        }
    }
    let mut front: Vec<[f64; 2]> = nondominated_indices(&inside)?
        .into_iter()
        .map(|i| inside[i])
        .collect();
    front.sort_by(|a, b| a[0].total_cmp(&b[0]));

    let mut area = 0.0;
    let mut upper = r2;
    for p in &front {
        area += (r1 - p[0]) * (upper - p[1]);
        upper = p[1];
    }
    Ok(area)
}

/// Exclusive hypervolume contribution of every member of a mutually
/// nondominated 2-D set. Members outside the reference box contribute 0.
pub fn hv_contributions_2d<P: AsRef<[f64]>>(
    front: &[P],
    reference: &ObjectiveVector,
) -> Result<Vec<f64>> {
    check_ref_2d(reference)?;
    let (r1, r2) = (reference[0], reference[1]);
    let mut contrib = vec![0.0; front.len()];
    let mut inside: Vec<usize> = Vec::with_capacity(front.len());
    for (i, v) in front.iter().enumerate() {
        let v = v.as_ref();
        if v.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: v.len() });
        }
        if v[0] < r1 && v[1] < r2 {
            inside.push(i);
        }
    }
    inside.sort_by(|&i, &j| {
        let (a, b) = (front[i].as_ref(), front[j].as_ref());
        a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1]))
    });
    for (k, &i) in inside.iter().enumerate() {
        let v = front[i].as_ref();
        let right = inside.get(k + 1).map_or(r1, |&j| front[j].as_ref()[0]);
        let above = if k == 0 { r2 } else { front[inside[k - 1]].as_ref()[1] };
        contrib[i] = ((right - v[0]) * (above - v[1])).max(0.0);
    }
    Ok(contrib)
}
