//! The piecewise cubic binary penalty and its box-constrained proximal map.
//!
//! `g(x) = x³ − 3x² + 3x` for `x ≤ ½` and `1 − x³` otherwise. On `[0, 1]` it
//! vanishes exactly at the two binary points and is symmetric about `½`.
//! The box-constrained proximal operator
//!
//! ```text
//! prox(z; τ) = argmin_{w ∈ [0,1]}  g(w) + (w − z)² / (2τ)
//! ```
//!
//! has a closed form with two regimes: for `τ ≥ 1/6` it snaps to `{0}` or
//! `{1}` (both at `z = ½`), and for `τ < 1/6` it has an interior branch given
//! by the roots of two quadratics.

use crate::error::{Error, Result};

/// `τ` at or above which the prox output is always binary.
pub const LARGE_TAU: f64 = 1.0 / 6.0;

/// Absolute slack tolerated on a discriminant before it is treated as a bug.
const DISCRIMINANT_SLACK: f64 = 1e-12;

#[inline]
pub fn g_value(x: f64) -> f64 {
    if x <= 0.5 {
        x * x * x - 3.0 * x * x + 3.0 * x
    } else {
        1.0 - x * x * x
    }
}

/// Limiting subdifferential of `g`: a singleton away from `½`, a pair at `½`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Subdifferential {
    Single(f64),
    Pair(f64, f64),
}

impl Subdifferential {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Subdifferential::Single(v) => vec![v],
            Subdifferential::Pair(a, b) => vec![a, b],
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        match *self {
            Subdifferential::Single(a) => a == v,
            Subdifferential::Pair(a, b) => a == v || b == v,
        }
    }
}

pub fn g_subdiff(x: f64) -> Subdifferential {
    if x < 0.5 {
        Subdifferential::Single(3.0 * x * x - 6.0 * x + 3.0)
    } else if x == 0.5 {
        Subdifferential::Pair(-0.75, 0.75)
    } else {
        Subdifferential::Single(-3.0 * x * x)
    }
}

/// Separable penalty `p(x) = Σ g(xᵢ)`.
pub fn p_value(x: &[f64]) -> f64 {
    x.iter().map(|&v| g_value(v)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxBranch {
    /// `τ ≥ 1/6`: output is binary.
    LargeTau,
    /// `0 < τ < 1/6`: output may be interior.
    SmallTau,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxRegime {
    tau: f64,
    branch: ProxBranch,
}

impl ProxRegime {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::param(format!(
                "prox parameter must be positive and finite, got {tau}"
            )));
        }
        let branch = if tau >= LARGE_TAU {
            ProxBranch::LargeTau
        } else {
            ProxBranch::SmallTau
        };
        Ok(Self { tau, branch })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn branch(&self) -> ProxBranch {
        self.branch
    }

    /// Full minimizer set at `z` plus the tie-broken selection.
    pub fn eval(&self, z: f64) -> Result<ScalarProxResult> {
        let tau = self.tau;
        match self.branch {
            ProxBranch::LargeTau => Ok(if z < 0.5 {
                ScalarProxResult::single(0.0)
            } else if z == 0.5 {
                ScalarProxResult::pair(0.0, 1.0)
            } else {
                ScalarProxResult::single(1.0)
            }),
            ProxBranch::SmallTau => {
                if z <= 3.0 * tau {
                    Ok(ScalarProxResult::single(0.0))
                } else if z < 0.5 {
                    Ok(ScalarProxResult::single(lower_root(z, tau)?))
                } else if z == 0.5 {
                    Ok(ScalarProxResult::pair(lower_root(z, tau)?, upper_root(z, tau)?))
                } else if z < 1.0 - 3.0 * tau {
                    Ok(ScalarProxResult::single(upper_root(z, tau)?))
                } else {
                    Ok(ScalarProxResult::single(1.0))
                }
            }
        }
    }
}

/// Stationary point of the left piece on `(0, ½)`:
/// `1 + (√(1 + 12τ(z − 1)) − 1) / (6τ)`.
fn lower_root(z: f64, tau: f64) -> Result<f64> {
    let disc = guarded_sqrt_arg(1.0 + 12.0 * tau * (z - 1.0), z, tau)?;
    Ok((1.0 + (disc.sqrt() - 1.0) / (6.0 * tau)).clamp(0.0, 1.0))
}

/// Stationary point of the right piece on `(½, 1)`:
/// `(1 − √(1 − 12τz)) / (6τ)`.
fn upper_root(z: f64, tau: f64) -> Result<f64> {
    let disc = guarded_sqrt_arg(1.0 - 12.0 * tau * z, z, tau)?;
    Ok(((1.0 - disc.sqrt()) / (6.0 * tau)).clamp(0.0, 1.0))
}

// Both discriminants are bounded below by (1 − 6τ)² > 0 on their branch, so a
// negative value can only be rounding noise.
fn guarded_sqrt_arg(d: f64, z: f64, tau: f64) -> Result<f64> {
    if d >= 0.0 {
        Ok(d)
    } else if d >= -DISCRIMINANT_SLACK {
        Ok(0.0)
    } else {
        Err(Error::Internal(format!(
            "negative prox discriminant {d:e} at z = {z}, tau = {tau}"
        )))
    }
}

/// Minimizer set of the scalar prox problem (one or two points) and the
/// deterministic selection used by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarProxResult {
    candidates: [f64; 2],
    len: usize,
    selected: f64,
}

impl ScalarProxResult {
    fn single(v: f64) -> Self {
        Self {
            candidates: [v, v],
            len: 1,
            selected: v,
        }
    }

    // Ties select the smaller candidate.
    fn pair(a: f64, b: f64) -> Self {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Self {
            candidates: [lo, hi],
            len: 2,
            selected: lo,
        }
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates[..self.len]
    }

    pub fn selected(&self) -> f64 {
        self.selected
    }

    pub fn is_tie(&self) -> bool {
        self.len == 2
    }
}

pub fn prox_scalar(z: f64, tau: f64) -> Result<ScalarProxResult> {
    ProxRegime::new(tau)?.eval(z)
}

/// Component-wise prox of `τλ·p` over the unit box with the tie-break applied.
pub fn prox_vector(z: &[f64], tau_lambda: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; z.len()];
    prox_vector_into(z, tau_lambda, &mut out)?;
    Ok(out)
}

pub fn prox_vector_into(z: &[f64], tau_lambda: f64, out: &mut [f64]) -> Result<()> {
    let regime = ProxRegime::new(tau_lambda)?;
    for (o, &zi) in out.iter_mut().zip(z) {
        *o = regime.eval(zi)?.selected();
    }
    Ok(())
}

/// Objective of the scalar prox problem; used by oracles and tests.
#[inline]
pub fn prox_objective(w: f64, z: f64, tau: f64) -> f64 {
    g_value(w) + (w - z) * (w - z) / (2.0 * tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::grid_prox_oracle;

    #[test]
    fn g_values() {
        assert_eq!(g_value(0.0), 0.0);
        assert_eq!(g_value(1.0), 0.0);
        assert_eq!(g_value(0.5), 0.875);
        // both pieces meet at ½
        assert_eq!(1.0 - 0.5f64.powi(3), 0.875);
    }

    #[test]
    fn g_symmetry_and_sign() {
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            assert!((g_value(x) - g_value(1.0 - x)).abs() < 1e-14, "x = {x}");
            if k == 0 || k == 1000 {
                assert_eq!(g_value(x), 0.0);
            } else {
                assert!(g_value(x) > 0.0);
            }
        }
    }

    #[test]
    fn subdifferential_rows() {
        assert_eq!(g_subdiff(0.0), Subdifferential::Single(3.0));
        assert_eq!(g_subdiff(0.5), Subdifferential::Pair(-0.75, 0.75));
        assert_eq!(g_subdiff(1.0), Subdifferential::Single(-3.0));
    }

    // The lower bound |ν| ≥ 3 holds at the binary points only; on [0, ½)
    // the derivative 3(1 − x)² is at most 3.
    #[test]
    fn subgradient_magnitudes() {
        for x in [0.0, 1.0] {
            assert!(g_subdiff(x).values().iter().all(|v| v.abs() >= 3.0));
        }
        for k in 0..500 {
            let x = k as f64 / 1000.0;
            match g_subdiff(x) {
                Subdifferential::Single(v) => assert!(v.abs() <= 3.0),
                Subdifferential::Pair(..) => unreachable!(),
            }
        }
        assert!(g_subdiff(0.5).values().iter().all(|v| v.abs() < 3.0));
    }

    #[test]
    fn p_examples() {
        assert_eq!(p_value(&[0.0, 1.0, 1.0, 0.0]), 0.0);
        assert_eq!(p_value(&[0.5]), 0.875);
        assert_eq!(p_value(&[0.5, 0.5]), 1.75);
    }

    #[test]
    fn prox_examples() {
        assert_eq!(prox_scalar(0.3, 0.25).unwrap().candidates(), &[0.0]);

        let tie = prox_scalar(0.5, 0.25).unwrap();
        assert_eq!(tie.candidates(), &[0.0, 1.0]);
        assert_eq!(tie.selected(), 0.0);

        let r = prox_scalar(0.4, 0.1).unwrap();
        assert_eq!(r.candidates().len(), 1);
        assert!((r.selected() - 0.215_250_437_0).abs() < 1e-9, "{}", r.selected());
        let grid = grid_prox_oracle(0.4, 0.1, 1e-6).unwrap();
        assert!(grid.iter().all(|w| (w - r.selected()).abs() < 1e-4));

        assert_eq!(prox_scalar(0.05, 0.1).unwrap().candidates(), &[0.0]);
    }

    #[test]
    fn prox_rejects_bad_tau() {
        assert!(matches!(prox_scalar(0.1, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(prox_scalar(0.1, -1.0), Err(Error::Parameter(_))));
        assert!(matches!(prox_scalar(0.1, f64::NAN), Err(Error::Parameter(_))));
    }

    #[test]
    fn regime_boundary_uses_large_tau_formula() {
        assert_eq!(ProxRegime::new(LARGE_TAU).unwrap().branch(), ProxBranch::LargeTau);
        assert_eq!(ProxRegime::new(0.166).unwrap().branch(), ProxBranch::SmallTau);
        assert_eq!(prox_scalar(0.45, LARGE_TAU).unwrap().candidates(), &[0.0]);
    }

    #[test]
    fn prox_vector_examples() {
        assert_eq!(prox_vector(&[0.3, 0.7], 0.25).unwrap(), vec![0.0, 1.0]);
        assert_eq!(prox_vector(&[0.5, 0.5], 0.2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(prox_vector(&[-2.0, 3.0], 0.01).unwrap(), vec![0.0, 1.0]);
        assert!(prox_vector(&[0.1], 0.0).is_err());
    }

    #[test]
    fn small_tau_tie_has_reflected_roots() {
        let r = prox_scalar(0.5, 0.1).unwrap();
        let c = r.candidates();
        assert_eq!(c.len(), 2);
        assert!((c[0] + c[1] - 1.0).abs() < 1e-14);
        assert_eq!(r.selected(), c[0]);
    }
}
