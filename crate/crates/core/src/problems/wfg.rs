//! WFG1 for two objectives.
//!
//! Decision variables `z_i ∈ [0, 2i]` (1-based). `k` position parameters come
//! first, followed by `l` distance parameters.

use std::f64::consts::{FRAC_PI_2, PI};

const EPS: f64 = 1.0e-10;

fn correct_to_01(a: f64) -> f64 {
    if a < 0.0 && a >= -EPS {
        0.0
    } else if a > 1.0 && a <= 1.0 + EPS {
        1.0
    } else {
        a.clamp(0.0, 1.0)
    }
}

fn s_linear(y: f64, a: f64) -> f64 {
    // z / 2i cannot always hit 0.35 exactly; a few-ulp residue would survive
    // into the 0.02 polynomial bias as a large value
    if (y - a).abs() <= 4.0 * f64::EPSILON {
        return 0.0;
    }
    correct_to_01((y - a).abs() / ((a - y).floor() + a).abs())
}

fn b_flat(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - b).floor().min(0.0) * a * (b - y) / b;
    let t2 = (c - y).floor().min(0.0) * (1.0 - a) * (y - c) / (1.0 - c);
    correct_to_01(a + t1 - t2)
}

fn b_poly(y: f64, alpha: f64) -> f64 {
    correct_to_01(y.powf(alpha))
}

fn r_sum(y: &[f64], w: &[f64]) -> f64 {
    let num: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum();
    let den: f64 = w.iter().sum();
    correct_to_01(num / den)
}

/// Evaluates WFG1 with `k` position parameters and `M = 2`.
pub(crate) fn wfg1(z: &[f64], k: usize) -> [f64; 2] {
    let n = z.len();
    let mut y: Vec<f64> = z
        .iter()
        .enumerate()
        .map(|(i, &v)| correct_to_01(v / (2.0 * (i + 1) as f64)))
        .collect();

    for v in &mut y[k..] {
        *v = s_linear(*v, 0.35);
    }
    for v in &mut y[k..] {
        *v = b_flat(*v, 0.8, 0.75, 0.85);
    }
    for v in &mut y {
        *v = b_poly(*v, 0.02);
    }

    let w: Vec<f64> = (1..=n).map(|i| 2.0 * i as f64).collect();
    let t_pos = r_sum(&y[..k], &w[..k]);
    let t_dist = r_sum(&y[k..], &w[k..]);

    // degeneracy constant A_1 = 1, so the position value passes through unchanged
    let x1 = t_dist.max(1.0) * (t_pos - 0.5) + 0.5;
    let x_m = t_dist;

    let convex = 1.0 - (x1 * FRAC_PI_2).cos();
    let big_a = 5.0;
    let mixed = 1.0 - x1 - (2.0 * big_a * PI * x1 + FRAC_PI_2).cos() / (2.0 * big_a * PI);
    [x_m + 2.0 * convex, x_m + 4.0 * mixed]
}

/// Optimal value of distance parameter `i` (0-based).
pub(crate) fn optimal_distance_value(i: usize) -> f64 {
    2.0 * (i + 1) as f64 * 0.35
}
