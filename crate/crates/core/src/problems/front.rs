//! True Pareto fronts sampled at equal arc-length spacing.
//!
//! SPHERE, DENT and ZDT3 have analytic fronts; their length is obtained by
//! rectification (chord sums on a fine parameter grid) and `k` points are
//! placed at arc lengths `(i + ½)·L/k`. WFG1 is explored on a decision-space
//! grid, filtered for nondominance and thinned with PSA.

use std::collections::HashSet;

use rayon::prelude::*;

use super::{dent_on_front, wfg, zdt3_f2, ProblemId, ProblemSpec};
use crate::error::{Error, Result};
use crate::pareto::{nondominated_indices, ObjectiveVector};
use crate::reffront::psa_select;

/// Grid resolution per WFG1 position parameter.
pub const WFG1_GRID_PER_PARAMETER: usize = 10_000;

const RECTIFICATION_STEPS: usize = 200_000;
const ZDT3_SAMPLES: usize = 1_000_000;

/// A front curve `t ∈ [0, 1] → R^2` restricted to nondominated parameter
/// intervals, ordered by ascending first objective.
#[derive(Clone)]
pub struct ParametricFront {
    curve: fn(f64) -> [f64; 2],
    intervals: Vec<(f64, f64)>,
}

impl std::fmt::Debug for ParametricFront {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricFront")
            .field("intervals", &self.intervals)
            .finish()
    }
}

struct ArcTable {
    params: Vec<f64>,
    cum: Vec<f64>,
}

impl ParametricFront {
    pub fn point(&self, t: f64) -> [f64; 2] {
        (self.curve)(t)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    fn tables(&self) -> Vec<ArcTable> {
        let total_width: f64 = self.intervals.iter().map(|(a, b)| b - a).sum();
        self.intervals
            .iter()
            .map(|&(a, b)| {
                let steps = ((RECTIFICATION_STEPS as f64 * (b - a) / total_width).ceil() as usize).max(1000);
                let mut params = Vec::with_capacity(steps + 1);
                let mut cum = Vec::with_capacity(steps + 1);
                let mut prev = self.point(a);
                params.push(a);
                cum.push(0.0);
                for i in 1..=steps {
                    let t = if i == steps { b } else { a + (b - a) * i as f64 / steps as f64 };
                    let p = self.point(t);
                    let seg = ((p[0] - prev[0]).powi(2) + (p[1] - prev[1]).powi(2)).sqrt();
                    params.push(t);
                    cum.push(cum.last().unwrap() + seg);
                    prev = p;
                }
                ArcTable { params, cum }
            })
            .collect()
    }

    /// Total arc length over all nondominated intervals.
    pub fn length(&self) -> f64 {
        self.tables().iter().map(|t| *t.cum.last().unwrap()).sum()
    }

    /// `k` points at arc lengths `(i + ½)·L/k`, skipping the gaps between
    /// intervals.
    pub fn uniform_points(&self, k: usize) -> Vec<ObjectiveVector> {
        let tables = self.tables();
        let lengths: Vec<f64> = tables.iter().map(|t| *t.cum.last().unwrap()).collect();
        let total: f64 = lengths.iter().sum();
        let delta = total / k as f64;

        let mut out = Vec::with_capacity(k);
        let mut table_idx = 0;
        let mut offset = 0.0;
        for i in 0..k {
            let s = (i as f64 + 0.5) * delta;
            while table_idx + 1 < tables.len() && s > offset + lengths[table_idx] {
                offset += lengths[table_idx];
                table_idx += 1;
            }
            let table = &tables[table_idx];
            let local = (s - offset).clamp(0.0, lengths[table_idx]);
            let j = table.cum.partition_point(|&c| c <= local).clamp(1, table.cum.len() - 1) - 1;
            let w = (local - table.cum[j]) / (table.cum[j + 1] - table.cum[j]);
            let t = table.params[j] + w * (table.params[j + 1] - table.params[j]);
            let p = self.point(t);
            out.push(ObjectiveVector::new(p.to_vec()).expect("finite front point"));
        }
        out
    }
}

fn sphere_curve(t: f64) -> [f64; 2] {
    [2.0 * t * t, 2.0 * (1.0 - t) * (1.0 - t)]
}

fn dent_curve(t: f64) -> [f64; 2] {
    dent_on_front(-4.0 + 8.0 * t)
}

// f1 = u² keeps the curve smooth at the f1 = 0 end
fn zdt3_curve(u: f64) -> [f64; 2] {
    let f1 = u * u;
    [f1, zdt3_f2(f1, 1.0)]
}

pub(super) fn parametric_front(id: ProblemId) -> Option<ParametricFront> {
    match id {
        ProblemId::Sphere => Some(ParametricFront { curve: sphere_curve, intervals: vec![(0.0, 1.0)] }),
        ProblemId::Dent => Some(ParametricFront { curve: dent_curve, intervals: vec![(0.0, 1.0)] }),
        ProblemId::Zdt3 => Some(ParametricFront {
            curve: zdt3_curve,
            intervals: zdt3_front_segments()
                .into_iter()
                .map(|(a, b)| (a.sqrt(), b.sqrt()))
                .collect(),
        }),
        ProblemId::Wfg1 => None,
    }
}

/// Nondominated `f1` intervals of the ZDT3 front.
///
/// Found by scanning a dense `f1` grid, then refining each interval end to
/// the local minimum of `f2` and each start to the crossing of the previous
/// interval's minimum.
pub fn zdt3_front_segments() -> Vec<(f64, f64)> {
    let f2 = |f1: f64| zdt3_f2(f1, 1.0);
    let n = ZDT3_SAMPLES;
    let grid = |i: usize| i as f64 / (n - 1) as f64;

    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut running_min = f64::INFINITY;
    for i in 0..n {
        let v = f2(grid(i));
        if v < running_min {
            match runs.last_mut() {
                Some(r) if r.1 + 1 == i => r.1 = i,
                _ => runs.push((i, i)),
            }
            running_min = v;
        }
    }

    let mut segments = Vec::with_capacity(runs.len());
    let mut prev_min = f64::INFINITY;
    for (start, end) in runs {
        let a = if start == 0 {
            0.0
        } else {
            let mut i = start;
            while i < end && f2(grid(i)) >= prev_min {
                i += 1;
            }
            bisect_crossing(&f2, grid(i - 1), grid(i), prev_min)
        };
        let b = if end == n - 1 {
            1.0
        } else {
            golden_min(&f2, grid(end - 1), grid(end + 1))
        };
        prev_min = f2(b);
        segments.push((a, b));
    }
    segments
}

/// Smallest point in `[lo, hi]` where the decreasing `f` drops below `level`.
fn bisect_crossing(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, level: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn golden_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        let c = hi - ratio * (hi - lo);
        let d = lo + ratio * (hi - lo);
        if f(c) < f(d) {
            hi = d;
        } else {
            lo = c;
        }
    }
    0.5 * (lo + hi)
}

/// `k` points spread along the Pareto front of `spec`.
pub fn true_front_points(spec: &ProblemSpec, k: usize) -> Result<Vec<ObjectiveVector>> {
    true_front_points_with_grid(spec, k, WFG1_GRID_PER_PARAMETER)
}

/// As [`true_front_points`], with an explicit WFG1 grid resolution.
pub fn true_front_points_with_grid(
    spec: &ProblemSpec,
    k: usize,
    grid: usize,
) -> Result<Vec<ObjectiveVector>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    match spec.front_param() {
        Some(front) => Ok(front.uniform_points(k)),
        None if spec.id == ProblemId::Wfg1 => wfg1_grid_front(spec, k, grid),
        None => Err(Error::Unknown(format!("no front construction for {}", spec.id))),
    }
}

const GRID_BLOCK_ROWS: usize = 64;
/// Objective-space cell size used to thin the WFG1 grid samples.
const FRONT_LATTICE: f64 = 1e-6;

fn wfg1_grid_front(spec: &ProblemSpec, k: usize, grid: usize) -> Result<Vec<ObjectiveVector>> {
    if grid < 2 {
        return Err(Error::InvalidParameter("grid needs at least 2 samples".into()));
    }
    let n = spec.n;
    let position = 2;
    let mut base: Vec<f64> = (0..n).map(wfg::optimal_distance_value).collect();
    base[..position].fill(0.0);
    let step = |dim: usize, i: usize| spec.upper[dim] * i as f64 / (grid - 1) as f64;

    let row = |i: usize| -> Vec<[f64; 2]> {
        let mut x = base.clone();
        x[0] = step(0, i);
        (0..grid)
            .map(|j| {
                x[1] = step(1, j);
                let f = spec.evaluate(&x).expect("grid point has the right dimension");
                [f[0], f[1]]
            })
            .collect()
    };

    // grid points sharing a lattice cell collapse to the first one seen
    let cell = |f: &[f64; 2]| ((f[0] / FRONT_LATTICE).round() as i64, (f[1] / FRONT_LATTICE).round() as i64);
    let mut seen = HashSet::new();
    let mut candidates: Vec<[f64; 2]> = Vec::new();
    for start in (0..grid).step_by(GRID_BLOCK_ROWS) {
        let end = (start + GRID_BLOCK_ROWS).min(grid);
        let block: Vec<Vec<[f64; 2]>> = (start..end).into_par_iter().map(row).collect();
        for f in block.into_iter().flatten() {
            if seen.insert(cell(&f)) {
                candidates.push(f);
            }
        }
    }
    let front: Vec<[f64; 2]> = nondominated_indices(&candidates)?
        .into_iter()
        .map(|i| candidates[i])
        .collect();

    log::debug!("WFG1 grid {grid}: {} nondominated points", front.len());
    let mut chosen: Vec<[f64; 2]> = if front.len() <= k {
        front
    } else {
        psa_select(&front, k).into_iter().map(|i| front[i]).collect()
    };
    chosen.sort_by(|a, b| a[0].total_cmp(&b[0]));
    chosen
        .into_iter()
        .map(|p| ObjectiveVector::new(p.to_vec()))
        .collect()
}
