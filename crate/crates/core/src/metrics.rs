//! Evaluation metrics and independent reference computations.

use serde::{Deserialize, Serialize};

use crate::cubic::prox_objective;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dist2, norm2};
use crate::objectives::Objective;

/// `1 − ‖x − x*‖₂ / ‖x*‖₂`. Not clamped: it goes negative for poor estimates.
pub fn accuracy(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_dim(x_star.len(), x.len())?;
    let denom = norm2(x_star);
    if denom == 0.0 {
        return Err(Error::Undefined("accuracy needs a nonzero reference vector".into()));
    }
    Ok(1.0 - dist2(x, x_star) / denom)
}

/// Fraction of mismatched entries.
pub fn bit_error_rate(x: &[f64], x_star: &[f64]) -> Result<f64> {
    check_dim(x_star.len(), x.len())?;
    if x.is_empty() {
        return Err(Error::Undefined("bit error rate of an empty vector".into()));
    }
    let errors = x.iter().zip(x_star).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / x.len() as f64)
}

/// Relative gap to a reference optimum, in percent.
pub fn gap(obj: f64, lowest: f64) -> Result<f64> {
    if lowest == 0.0 {
        return Err(Error::Undefined("gap against a zero reference value".into()));
    }
    Ok((obj - lowest).abs() / lowest.abs() * 100.0)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub accuracy: Option<f64>,
    pub ber: Option<f64>,
    pub gap_percent: Option<f64>,
    pub objective: f64,
    pub is_binary: bool,
    pub stationarity_residual: f64,
}

/// Largest dimension accepted by [`brute_force_min`].
pub const BRUTE_FORCE_MAX_DIM: usize = 24;

/// Exhaustive minimum of `f` over `{0,1}ⁿ`.
///
/// Corners are visited in lexicographic order with `x[0]` most significant
/// and only strict improvements replace the incumbent, so ties resolve to the
/// lexicographically smallest minimizer.
pub fn brute_force_min(obj: &dyn Objective) -> Result<(Vec<f64>, f64)> {
    let n = obj.dim();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::Capability(format!(
            "exhaustive search is limited to n <= {BRUTE_FORCE_MAX_DIM}, got {n}"
        )));
    }
    let mut x = vec![0.0; n];
    let mut best_x = x.clone();
    let mut best = obj.value(&x);
    for code in 1u64..(1u64 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = ((code >> (n - 1 - i)) & 1) as f64;
        }
        let v = obj.value(&x);
        if v < best {
            best = v;
            best_x.copy_from_slice(&x);
        }
    }
    Ok((best_x, best))
}

/// All grid points `w ∈ [0,1]` with spacing `step` whose prox objective is
/// within `1e-8` of the grid minimum.
pub fn grid_prox_oracle(z: f64, tau: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1e-4) {
        return Err(Error::param(format!("grid step must lie in (0, 1e-4], got {step}")));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::param(format!("tau must be positive, got {tau}")));
    }
    let count = (1.0 / step).round() as usize;
    let values: Vec<(f64, f64)> = (0..=count)
        .map(|k| {
            let w = (k as f64 * step).min(1.0);
            (w, prox_objective(w, z, tau))
        })
        .collect();
    let best = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    Ok(values
        .into_iter()
        .filter(|(_, v)| *v <= best + 1e-8)
        .map(|(w, _)| w)
        .collect())
}

/// Central differences with step `h`.
pub fn finite_difference_gradient(obj: &dyn Objective, x: &[f64], h: f64) -> Result<Vec<f64>> {
    check_dim(obj.dim(), x.len())?;
    if !(h > 0.0) {
        return Err(Error::param(format!("difference step must be positive, got {h}")));
    }
    let mut probe = x.to_vec();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let xi = probe[i];
        probe[i] = xi + h;
        let up = obj.value(&probe);
        probe[i] = xi - h;
        let down = obj.value(&probe);
        probe[i] = xi;
        g[i] = (up - down) / (2.0 * h);
    }
    Ok(g)
}
