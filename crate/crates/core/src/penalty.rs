//! Penalty objective `F(x; λ) = f(x) + λ p(x)`, the threshold `λ̄`, and
//! P-stationarity certificates.

use serde::{Deserialize, Serialize};

use crate::cubic::{p_value, ProxRegime};
use crate::error::{Error, Result};
use crate::objectives::{check_point, Objective};

/// Checks `x ∈ [0,1]ⁿ`.
pub fn check_box(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !(0.0..=1.0).contains(v)) {
        None => Ok(()),
        Some(i) => Err(Error::Domain(format!("component {i} = {} lies outside [0, 1]", x[i]))),
    }
}

pub fn is_binary(x: &[f64]) -> bool {
    x.iter().all(|&v| v == 0.0 || v == 1.0)
}

/// A point of the unit box `[0,1]ⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoxVector(Vec<f64>);

impl BoxVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        check_box(&x)?;
        Ok(Self(x))
    }

    /// Projects onto the box; NaN components become 0.
    pub fn clamped(mut x: Vec<f64>) -> Self {
        for v in x.iter_mut() {
            *v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        }
        Self(x)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn is_binary(&self) -> bool {
        is_binary(&self.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for BoxVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `f + λp` over a borrowed base objective.
#[derive(Clone, Copy)]
pub struct PenaltyObjective<'a> {
    base: &'a dyn Objective,
    lambda: f64,
}

impl<'a> PenaltyObjective<'a> {
    pub fn new(base: &'a dyn Objective, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::param(format!(
                "penalty weight must be nonnegative, got {lambda}"
            )));
        }
        Ok(Self { base, lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn base(&self) -> &'a dyn Objective {
        self.base
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_point(self.base, x)?;
        check_box(x)?;
        Ok(self.value_unchecked(x))
    }

    #[inline]
    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        self.base.value(x) + self.lambda * p_value(x)
    }
}

pub fn penalty_value(obj: &dyn Objective, x: &[f64], lambda: f64) -> Result<f64> {
    PenaltyObjective::new(obj, lambda)?.value(x)
}

/// `λ̄ ≥ max_{x ∈ box} ‖∇f(x)‖∞ / 3` as declared by the objective.
pub fn lambda_bar(obj: &dyn Objective) -> Result<f64> {
    obj.lambda_bar_bound()
        .ok_or_else(|| Error::Capability("objective declares no closed-form gradient bound".into()))
}

/// Penalty level `λ̄ + 1/(3τ)` above which one prox step lands on a binary point.
pub fn binary_snap_threshold(lambda_bar: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::param(format!("tau must be positive, got {tau}")));
    }
    Ok(lambda_bar + 1.0 / (3.0 * tau))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationarityCertificate {
    /// `min ‖x − v‖₂` over `v` in the prox set at `x − τ∇f(x)`.
    pub residual: f64,
    pub tau: f64,
    pub lambda: f64,
    pub is_binary: bool,
}

impl StationarityCertificate {
    pub fn is_stationary(&self, tol: f64) -> bool {
        self.residual < tol
    }
}

pub fn stationarity_check(x: &[f64], obj: &dyn Objective, tau: f64, lambda: f64) -> Result<StationarityCertificate> {
    check_point(obj, x)?;
    check_box(x)?;
    if !(lambda > 0.0) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    if !(tau > 0.0) {
        return Err(Error::param(format!("tau must be positive, got {tau}")));
    }
    let regime = ProxRegime::new(tau * lambda)?;
    let grad = obj.gradient(x);
    let mut sq = 0.0;
    for (&xi, &gi) in x.iter().zip(&grad) {
        let prox = regime.eval(xi - tau * gi)?;
        let d = prox
            .candidates()
            .iter()
            .map(|c| (xi - c) * (xi - c))
            .fold(f64::INFINITY, f64::min);
        sq += d;
    }
    Ok(StationarityCertificate {
        residual: sq.sqrt(),
        tau,
        lambda,
        is_binary: is_binary(x),
    })
}
