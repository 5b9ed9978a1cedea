//! Two-sided Wilcoxon rank-sum test and sample quantiles.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest combined sample size for which the exact null distribution is used.
pub const EXACT_MAX_TOTAL: usize = 12;

/// Two-sided p-value of the Wilcoxon rank-sum test.
///
/// Tie-free samples with `|xs| + |ys| ≤ 12` use the exact null distribution
/// of the rank sum; everything else uses the normal approximation with tie
/// and continuity corrections.
pub fn wilcoxon_rank_sum(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::Empty("sample"));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: 0, value: *v });
    }
    let (n, m) = (xs.len(), ys.len());
    let total = n + m;
    let mut pooled: Vec<(f64, bool)> = xs.iter().map(|&v| (v, true)).chain(ys.iter().map(|&v| (v, false))).collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pooled[0].0 == pooled[total - 1].0 {
        return Ok(1.0);
    }

    let mut w = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < total {
        let mut j = i;
        while j + 1 < total && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        let rank = 0.5 * ((i + 1) + (j + 1)) as f64;
        w += rank * pooled[i..=j].iter().filter(|p| p.1).count() as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }

    if total <= EXACT_MAX_TOTAL && tie_term == 0.0 {
        return Ok(exact_p(n, m, w.round() as usize));
    }

    let (nf, mf, tf) = (n as f64, m as f64, total as f64);
    let mean = nf * (tf + 1.0) / 2.0;
    let var = nf * mf / 12.0 * ((tf + 1.0) - tie_term / (tf * (tf - 1.0)));
    if var <= 0.0 {
        return Ok(1.0);
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    Ok(erfc(z / std::f64::consts::SQRT_2).min(1.0))
}

/// Exact two-sided p-value for rank sum `w` of the first sample.
fn exact_p(n: usize, m: usize, w: usize) -> f64 {
    let counts = rank_sum_counts(n, n + m);
    let total: f64 = counts.iter().sum();
    let lower: f64 = counts[..=w].iter().sum();
    let upper: f64 = counts[w..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// `counts[s]` = number of `n`-subsets of `{1..total}` with sum `s`.
fn rank_sum_counts(n: usize, total: usize) -> Vec<f64> {
    let max_sum = total * (total + 1) / 2;
    // table[k][s] over ranks seen so far
    let mut table = vec![vec![0.0; max_sum + 1]; n + 1];
    table[0][0] = 1.0;
    for r in 1..=total {
        for k in (1..=n.min(r)).rev() {
            for s in (r..=max_sum).rev() {
                table[k][s] += table[k - 1][s - r];
            }
        }
    }
    table.swap_remove(n)
}

/// Type-7 sample quantile (linear interpolation between order statistics).
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Empty("sample"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

pub fn median(values: &[f64]) -> Result<f64> {
    quantile(values, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Two-sided p by listing every way to assign ranks to the first sample.
    fn enumerate_p(xs: &[f64], ys: &[f64]) -> f64 {
        let mut pooled: Vec<(f64, bool)> = xs.iter().map(|&v| (v, true)).chain(ys.iter().map(|&v| (v, false))).collect();
        pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total = pooled.len();
        let n = xs.len();
        let w: usize = pooled.iter().enumerate().filter(|(_, p)| p.1).map(|(i, _)| i + 1).sum();
        let (mut le, mut ge, mut all) = (0u64, 0u64, 0u64);
        for mask in 0u32..(1 << total) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let s: usize = (0..total).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).sum();
            all += 1;
            le += u64::from(s <= w);
            ge += u64::from(s >= w);
        }
        (2.0 * le.min(ge) as f64 / all as f64).min(1.0)
    }

    #[test]
    fn exact_examples() {
        assert_eq!(wilcoxon_rank_sum(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), 0.1);
        assert_eq!(wilcoxon_rank_sum(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0]).unwrap(), 0.1);
        assert_eq!(wilcoxon_rank_sum(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(wilcoxon_rank_sum(&[3.0; 4], &[3.0; 5]).unwrap(), 1.0);
        assert!(wilcoxon_rank_sum(&[], &[1.0]).is_err());
    }

    #[test]
    fn exact_branch_matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for total in 2..=10 {
            for n in 1..total {
                for _ in 0..5 {
                    let mut vals: Vec<f64> = (0..total).map(|i| i as f64 * 1.25 - 3.0).collect();
                    vals.shuffle(&mut rng);
                    let (xs, ys) = vals.split_at(n);
                    let p = wilcoxon_rank_sum(xs, ys).unwrap();
                    assert_eq!(p, enumerate_p(xs, ys), "n={n} m={}", total - n);
                }
            }
        }
    }

    #[test]
    fn large_shift_is_significant() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = (0..20).map(|i| 100.0 + i as f64 * 0.01).collect();
        assert!(wilcoxon_rank_sum(&xs, &ys).unwrap() < 0.001);
    }

    #[test]
    fn normal_branch_reference_value() {
        // n = m = 10, W = 55 against mean 105 and variance 175
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = (10..20).map(f64::from).collect();
        let z: f64 = 49.5 / 175f64.sqrt();
        let want = erfc(z / std::f64::consts::SQRT_2);
        assert!((wilcoxon_rank_sum(&xs, &ys).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn quantiles() {
        let v = [4.0, 1.0, 3.0, 2.0];
        assert_eq!(median(&v).unwrap(), 2.5);
        assert_eq!(quantile(&v, 0.25).unwrap(), 1.75);
        assert_eq!(quantile(&v, 0.75).unwrap(), 3.25);
        assert_eq!(quantile(&[7.0], 0.3).unwrap(), 7.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_in_unit_interval(
            xs in prop::collection::vec(-5i32..5, 1..15),
            ys in prop::collection::vec(-5i32..5, 1..15),
        ) {
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            let ys: Vec<f64> = ys.into_iter().map(f64::from).collect();
            let a = wilcoxon_rank_sum(&xs, &ys).unwrap();
            let b = wilcoxon_rank_sum(&ys, &xs).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
