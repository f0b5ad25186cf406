//! Standard normal CDF helpers that stay finite deep in the lower tail.
//!
//! Above [`TAIL_SWITCH`] the CDF comes from `erfc`, which keeps full relative
//! accuracy there. Below it, the Mills ratio `Φ(u)/φ(u)` is evaluated with
//! its Laplace continued fraction, so `log Φ` and `φ/Φ` never underflow.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

/// Lower-tail switch point. The continued fraction converges to machine
/// precision within 30 terms for `|u| ≥ 5`.
pub const TAIL_SWITCH: f64 = -5.0;

const CF_TERMS: usize = 60;

#[inline]
pub fn npdf(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

#[inline]
fn log_npdf(u: f64) -> f64 {
    -0.5 * u * u - 0.5 * (2.0 * PI).ln()
}

/// `Φ(u) / φ(u)` for `u < 0`, via `1/(t + 1/(t + 2/(t + 3/(t + …))))`, `t = −u`.
fn lower_mills(u: f64) -> f64 {
    let t = -u;
    let mut acc = t;
    for k in (1..=CF_TERMS).rev() {
        acc = t + k as f64 / acc;
    }
    1.0 / acc
}

pub fn ncdf(u: f64) -> f64 {
    0.5 * erfc(-u * FRAC_1_SQRT_2)
}

pub fn log_ncdf(u: f64) -> f64 {
    if u < TAIL_SWITCH {
        log_npdf(u) + lower_mills(u).ln()
    } else if u > 0.0 {
        // Φ(u) = 1 − Φ(−u); keep the tiny complement exact
        (-0.5 * erfc(u * FRAC_1_SQRT_2)).ln_1p()
    } else {
        ncdf(u).ln()
    }
}

/// Inverse Mills ratio `φ(u) / Φ(u)`; decreasing in `u`, ≈ `−u` as `u → −∞`.
pub fn inv_mills(u: f64) -> f64 {
    if u < TAIL_SWITCH {
        1.0 / lower_mills(u)
    } else {
        npdf(u) / ncdf(u)
    }
}
