use std::f64::consts::LN_2;

use super::alpha::Alpha;
use crate::error::{Error, Result};

/// Slack above `ln 2` (or below 0) that is clamped instead of rejected.
pub const ENTROPY_CLAMP_TOL: f64 = 1e-12;

/// Binary Rényi entropy `h_α(p)` in nats.
pub fn binary_renyi_entropy(p: f64, alpha: Alpha) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(binary_renyi_unchecked(p, alpha))
}

pub(crate) fn binary_renyi_unchecked(p: f64, alpha: Alpha) -> f64 {
    let q = 1.0 - p;
    if alpha.is_one() {
        let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
        return term(p) + term(q);
    }
    let a = alpha.value();
    (p.powf(a) + q.powf(a)).ln() / (1.0 - a)
}

/// Checks that `v` is an entropy value of a binary variable, clamping
/// rounding-level excursions.
pub fn clamp_binary_entropy(v: f64) -> Result<f64> {
    if !(-ENTROPY_CLAMP_TOL..=LN_2 + ENTROPY_CLAMP_TOL).contains(&v) {
        return Err(Error::Domain(format!("entropy {v} outside [0, ln 2]")));
    }
    Ok(v.clamp(0.0, LN_2))
}

/// Inverse of `h_α` restricted to `[0, 1/2]`, by bisection.
pub fn inverse_binary_renyi(v: f64, alpha: Alpha) -> Result<f64> {
    let v = clamp_binary_entropy(v)?;
    if v == 0.0 {
        return Ok(0.0);
    }
    if v == LN_2 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_renyi_unchecked(mid, alpha) < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick whichever endpoint lands closer
    let dl = (binary_renyi_unchecked(lo, alpha) - v).abs();
    let dh = (binary_renyi_unchecked(hi, alpha) - v).abs();
    Ok(if dl <= dh { lo } else { hi })
}

/// Binary convolution `a ⋆ b = a(1−b) + b(1−a)`.
pub fn star(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}
