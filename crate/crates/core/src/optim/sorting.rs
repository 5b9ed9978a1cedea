//! Nondominated sorting, crowding distance and the survival rules built on
//! them.

use crate::error::{Error, Result};
use crate::indicators::hv_contributions_2d;
use crate::pareto::{dominates_slice, ObjectiveVector};
use crate::trace::Solution;

/// Partition into fronts `F1, F2, ...` of indices into `points`.
pub fn fast_nondominated_sort<P: AsRef<[f64]>>(points: &[P]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i].as_ref(), points[j].as_ref());
            if dominates_slice(a, b) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if dominates_slice(b, a) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Front rank (0-based) of every point.
pub fn front_ranks<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    let mut rank = vec![0; points.len()];
    for (r, front) in fast_nondominated_sort(points).iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// NSGA-II crowding distance within one front. Per-objective extremes get
/// `+inf`; interior points sum their normalized neighbour gaps.
pub fn crowding_distance<P: AsRef<[f64]>>(front: &[P]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].as_ref().len();
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..m {
        order.sort_by(|&a, &b| front[a].as_ref()[obj].total_cmp(&front[b].as_ref()[obj]));
        let lo = front[order[0]].as_ref()[obj];
        let hi = front[order[n - 1]].as_ref()[obj];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            let i = order[k];
            if dist[i].is_finite() {
                let gap = front[order[k + 1]].as_ref()[obj] - front[order[k - 1]].as_ref()[obj];
                dist[i] += gap / range;
            }
        }
    }
    dist
}

/// Indices of `mu` survivors: whole fronts first, the overflowing front cut
/// by descending crowding distance in one shot.
pub fn crowding_select<P: AsRef<[f64]>>(points: &[P], mu: usize) -> Vec<usize> {
    fill_by_fronts(points, mu, |front_pts, need| {
        let cd = crowding_distance(front_pts);
        let mut order: Vec<usize> = (0..front_pts.len()).collect();
        order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]));
        order.truncate(need);
        order.sort_unstable();
        order
    })
}

/// Indices of `mu` survivors where the overflowing front loses its smallest
/// crowding-distance member one at a time, recomputing after each removal.
pub fn scd_select<P: AsRef<[f64]>>(points: &[P], mu: usize) -> Vec<usize> {
    fill_by_fronts(points, mu, |front_pts, need| {
        let mut alive: Vec<usize> = (0..front_pts.len()).collect();
        while alive.len() > need {
            let sub: Vec<&[f64]> = alive.iter().map(|&i| front_pts[i].as_ref()).collect();
            let cd = crowding_distance(&sub);
            let worst = argmin(&cd);
            alive.remove(worst);
        }
        alive
    })
}

/// Sequential crowding-distance truncation of a population to `mu`.
pub fn scd_truncate(pop: &[Solution], mu: usize) -> Result<Vec<Solution>> {
    if pop.len() < mu {
        return Err(Error::InvalidParameter(format!(
            "cannot truncate {} solutions to {mu}",
            pop.len()
        )));
    }
    let objs: Vec<&[f64]> = pop.iter().map(Solution::objectives).collect();
    Ok(scd_select(&objs, mu).into_iter().map(|i| pop[i].clone()).collect())
}

/// Index of the front member to drop for the least hypervolume loss.
///
/// Members outside the reference box contribute nothing; they go first,
/// farthest outside first.
pub fn least_hv_contributor<P: AsRef<[f64]>>(front: &[P], reference: &ObjectiveVector) -> Result<usize> {
    let contrib = hv_contributions_2d(front, reference)?;
    let score: Vec<f64> = front
        .iter()
        .zip(&contrib)
        .map(|(p, &c)| {
            let excess = p
                .as_ref()
                .iter()
                .zip(reference.values())
                .map(|(v, r)| v - r)
                .fold(f64::NEG_INFINITY, f64::max);
            if excess >= 0.0 {
                -1.0 - excess
            } else {
                c
            }
        })
        .collect();
    Ok(argmin(&score))
}

/// Indices of `mu` survivors where the overflowing front repeatedly loses
/// its least hypervolume contributor.
pub fn hv_select<P: AsRef<[f64]>>(points: &[P], mu: usize, reference: &ObjectiveVector) -> Result<Vec<usize>> {
    let mut err = None;
    let keep = fill_by_fronts(points, mu, |front_pts, need| {
        let mut alive: Vec<usize> = (0..front_pts.len()).collect();
        while alive.len() > need {
            let sub: Vec<&[f64]> = alive.iter().map(|&i| front_pts[i].as_ref()).collect();
            match least_hv_contributor(&sub, reference) {
                Ok(k) => {
                    alive.remove(k);
                }
                Err(e) => {
                    err = Some(e);
                    alive.truncate(need);
                }
            }
        }
        alive
    });
    match err {
        Some(e) => Err(e),
        None => Ok(keep),
    }
}

/// Steady-state reduction step: index of the member to remove from a
/// population of `μ + 1`, taken from the worst front by least exclusive
/// hypervolume.
pub fn sms_removal<P: AsRef<[f64]>>(points: &[P], reference: &ObjectiveVector) -> Result<usize> {
    let fronts = fast_nondominated_sort(points);
    let worst = fronts.last().ok_or(Error::Empty("population"))?;
    if worst.len() == 1 {
        return Ok(worst[0]);
    }
    let sub: Vec<&[f64]> = worst.iter().map(|&i| points[i].as_ref()).collect();
    Ok(worst[least_hv_contributor(&sub, reference)?])
}

fn fill_by_fronts<P: AsRef<[f64]>>(
    points: &[P],
    mu: usize,
    mut cut: impl FnMut(&[&[f64]], usize) -> Vec<usize>,
) -> Vec<usize> {
    let mut keep = Vec::with_capacity(mu);
    for front in fast_nondominated_sort(points) {
        let need = mu - keep.len();
        if need == 0 {
            break;
        }
        if front.len() <= need {
            keep.extend(front);
        } else {
            let pts: Vec<&[f64]> = front.iter().map(|&i| points[i].as_ref()).collect();
            keep.extend(cut(&pts, need).into_iter().map(|k| front[k]));
        }
    }
    keep.sort_unstable();
    keep
}

/// First index of the minimum.
fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[best] {
            best = i;
        }
    }
    best
}
