//! Bounded SBX crossover and polynomial mutation.

use rand::Rng;

const EPS: f64 = 1.0e-14;

/// Simulated binary crossover on box-bounded variables.
pub fn sbx<R: Rng + ?Sized>(
    rng: &mut R,
    p1: &[f64],
    p2: &[f64],
    lower: &[f64],
    upper: &[f64],
    prob: f64,
    eta: f64,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.random::<f64>() > prob {
        return (c1, c2);
    }
    let exp = 1.0 / (eta + 1.0);
    for i in 0..p1.len() {
        if rng.random::<f64>() > 0.5 || (p1[i] - p2[i]).abs() <= EPS {
            continue;
        }
        let (y1, y2) = if p1[i] < p2[i] { (p1[i], p2[i]) } else { (p2[i], p1[i]) };
        let (yl, yu) = (lower[i], upper[i]);
        let u: f64 = rng.random();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(exp)
            } else {
                (1.0 / (2.0 - u * alpha)).powf(exp)
            }
        };
        let bq1 = spread(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
        let bq2 = spread(1.0 + 2.0 * (yu - y2) / (y2 - y1));
        let a = (0.5 * ((y1 + y2) - bq1 * (y2 - y1))).clamp(yl, yu);
        let b = (0.5 * ((y1 + y2) + bq2 * (y2 - y1))).clamp(yl, yu);
        if rng.random::<f64>() <= 0.5 {
            c1[i] = b;
            c2[i] = a;
        } else {
            c1[i] = a;
            c2[i] = b;
        }
    }
    (c1, c2)
}

/// Polynomial mutation, each variable independently with probability `prob`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    rng: &mut R,
    x: &mut [f64],
    lower: &[f64],
    upper: &[f64],
    prob: f64,
    eta: f64,
) {
    let exp = 1.0 / (eta + 1.0);
    for i in 0..x.len() {
        if rng.random::<f64>() > prob {
            continue;
        }
        let (yl, yu) = (lower[i], upper[i]);
        if yl == yu {
            x[i] = yl;
            continue;
        }
        let y = x[i];
        let d1 = (y - yl) / (yu - yl);
        let d2 = (yu - y) / (yu - yl);
        let r: f64 = rng.random();
        let dq = if r <= 0.5 {
            let v = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1).powf(eta + 1.0);
            v.powf(exp) - 1.0
        } else {
            let v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - v.powf(exp)
        };
        x[i] = (y + dq * (yu - yl)).clamp(yl, yu);
    }
}

/// Uniform sample in the box.
pub fn uniform_point<R: Rng + ?Sized>(rng: &mut R, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    lower.iter().zip(upper).map(|(l, u)| l + rng.random::<f64>() * (u - l)).collect()
}
