//! Bounded Δ_p archive and the offline trace postprocessing built on it.
//!
//! An incoming solution first passes a dominance gate: it is rejected if any
//! member weakly dominates it, otherwise the members it dominates are
//! dropped and it joins the archive. When the archive then holds more than
//! `|R|` members, the member `a` minimizing `Δ_p(A∖{a}, R)` is removed; ties
//! go to the smallest `GD_p(A∖{a}, R)`, then to the earliest inserted member.
//!
//! Each member keeps its row of distances to `R`, so a prune evaluates every
//! candidate removal in `O(|A|·(|A| + |R|))` while producing exactly the
//! values a from-scratch evaluation would.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicators::{delta_p, gd_p, power_mean, DeltaP};
use crate::pareto::{dominates_slice, euclidean, weakly_dominates_slice, ObjectiveVector};
use crate::reffront::ReferenceFront;
use crate::trace::{EvaluationTrace, Solution};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchiveStats {
    pub insertions_attempted: u64,
    pub dominance_rejections: u64,
    pub accepted: u64,
    pub prunes: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InsertOutcome {
    /// A member weakly dominates the candidate.
    Rejected,
    Accepted {
        /// Eval indices of members dropped because the candidate dominates them.
        displaced: Vec<usize>,
        /// Member removed by the capacity prune, if one ran.
        pruned: Option<Solution>,
    },
}

#[derive(Debug, Clone)]
pub struct BoundedArchive {
    members: Vec<Solution>,
    /// `rows[i][r]`: distance from member `i` to reference point `r`.
    rows: Vec<Vec<f64>>,
    /// `d(member, R)`.
    nearest: Vec<f64>,
    reference: ReferenceFront,
    p: f64,
    stats: ArchiveStats,
}

impl BoundedArchive {
    pub fn new(reference: ReferenceFront, p: f64) -> Result<Self> {
        if reference.is_empty() {
            return Err(Error::Empty("reference front"));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
        }
        Ok(Self {
            members: Vec::new(),
            rows: Vec::new(),
            nearest: Vec::new(),
            reference,
            p,
            stats: ArchiveStats::default(),
        })
    }

    pub fn capacity(&self) -> usize {
        self.reference.len()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Members in insertion order.
    pub fn members(&self) -> &[Solution] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Solution> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn reference(&self) -> &ReferenceFront {
        &self.reference
    }

    pub fn stats(&self) -> ArchiveStats {
        self.stats
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.members.iter().map(|s| s.f.clone()).collect()
    }

    /// `Δ_p(A, R)` of the current content.
    pub fn delta_to_reference(&self) -> Result<DeltaP> {
        delta_p(&self.objectives(), &self.reference.points, self.p)
    }

    pub fn insert(&mut self, x: Solution) -> Result<InsertOutcome> {
        let dim = self.reference.dim();
        if x.f.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: x.f.dim() });
        }
        self.stats.insertions_attempted += 1;

        if self
            .members
            .iter()
            .any(|m| weakly_dominates_slice(m.objectives(), x.objectives()))
        {
            self.stats.dominance_rejections += 1;
            return Ok(InsertOutcome::Rejected);
        }

        let mut displaced = Vec::new();
        let mut i = 0;
        while i < self.members.len() {
            if dominates_slice(x.objectives(), self.members[i].objectives()) {
                displaced.push(self.members[i].eval_index);
                self.remove_at(i);
            } else {
                i += 1;
            }
        }

        let row: Vec<f64> = self
            .reference
            .points
            .iter()
            .map(|r| euclidean(x.objectives(), r.values()))
            .collect();
        self.nearest.push(row.iter().copied().fold(f64::INFINITY, f64::min));
        self.rows.push(row);
        self.members.push(x);
        self.stats.accepted += 1;

        let pruned = if self.members.len() > self.capacity() {
            let victim = self.removal_choice();
            self.stats.prunes += 1;
            Some(self.remove_at(victim))
        } else {
            None
        };
        Ok(InsertOutcome::Accepted { displaced, pruned })
    }

    fn remove_at(&mut self, i: usize) -> Solution {
        self.rows.remove(i);
        self.nearest.remove(i);
        self.members.remove(i)
    }

    /// Index of the member whose removal leaves the smallest Δ_p to `R`.
    fn removal_choice(&self) -> usize {
        let n = self.members.len();
        let nr = self.reference.len();

        let mut min1 = vec![f64::INFINITY; nr];
        let mut min2 = vec![f64::INFINITY; nr];
        let mut arg1 = vec![usize::MAX; nr];
        for (i, row) in self.rows.iter().enumerate() {
            for (r, &d) in row.iter().enumerate() {
                if d < min1[r] {
                    min2[r] = min1[r];
                    min1[r] = d;
                    arg1[r] = i;
                } else if d < min2[r] {
                    min2[r] = d;
                }
            }
        }

        let mut best = 0;
        let mut best_h = f64::INFINITY;
        let mut best_gd = f64::INFINITY;
        for a in 0..n {
            let gd = power_mean(
                self.nearest.iter().enumerate().filter(|&(i, _)| i != a).map(|(_, &d)| d),
                n - 1,
                self.p,
            );
            let igd = power_mean(
                (0..nr).map(|r| if arg1[r] == a { min2[r] } else { min1[r] }),
                nr,
                self.p,
            );
            let h = gd.max(igd);
            if h < best_h || (h == best_h && gd < best_gd) {
                best = a;
                best_h = h;
                best_gd = gd;
            }
        }
        best
    }
}

/// Brute-force reference for the prune step: evaluates `Δ_p(A∖{a}, R)` from
/// scratch for every `a` and applies the same tie-breaks. Returns the index
/// into `a` of the member to remove.
pub fn delta1_removal_oracle(
    a: &[ObjectiveVector],
    reference: &ReferenceFront,
    p: f64,
) -> Result<usize> {
    if a.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "oracle needs at least 2 members, got {}",
            a.len()
        )));
    }
    let mut scored = Vec::with_capacity(a.len());
    for skip in 0..a.len() {
        let rest: Vec<&ObjectiveVector> = a
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, v)| v)
            .collect();
        let rest: Vec<&[f64]> = rest.iter().map(|v| v.values()).collect();
        let h = delta_p(&rest, &reference.points, p)?.value;
        scored.push((skip, h));
    }
    let h_min = scored.iter().map(|&(_, h)| h).fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = scored
        .iter()
        .filter(|&&(_, h)| h == h_min)
        .map(|&(i, _)| i)
        .collect();
    if tied.len() == 1 {
        return Ok(tied[0]);
    }
    let mut best = tied[0];
    let mut best_gd = f64::INFINITY;
    for &skip in &tied {
        let rest: Vec<&[f64]> = a
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, v)| v.values())
            .collect();
        let gd = gd_p(&rest, &reference.points, p)?;
        if gd < best_gd {
            best = skip;
            best_gd = gd;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Generation order.
    Forward,
    /// Reverse generation order, newest first.
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Forward => "forward",
            Self::Backward => "backward",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "forward" => Ok(Self::Forward),
            "backward" => Ok(Self::Backward),
            other => Err(Error::Unknown(format!("direction {other}"))),
        }
    }
}

/// Feeds every traced solution through a fresh archive bounded by `R`.
pub fn postprocess(
    trace: &EvaluationTrace,
    reference: &ReferenceFront,
    direction: Direction,
    p: f64,
) -> Result<BoundedArchive> {
    if trace.is_empty() {
        return Err(Error::Empty("trace"));
    }
    let mut archive = BoundedArchive::new(reference.clone(), p)?;
    match direction {
        Direction::Forward => {
            for s in &trace.solutions {
                archive.insert(s.clone())?;
            }
        }
        Direction::Backward => {
            for s in trace.solutions.iter().rev() {
                archive.insert(s.clone())?;
            }
        }
    }
    Ok(archive)
}
