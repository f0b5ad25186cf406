//! Smooth objectives over the unit box.
//!
//! Every objective exposes its value and gradient, plus a closed-form upper
//! bound on `max_{x ∈ [0,1]ⁿ} ‖∇f(x)‖∞ / 3` (the penalty threshold `λ̄`) and
//! an optional Lipschitz estimate of the gradient for diagnostics.

mod lq;
pub mod normal;
mod onebit;
mod qubo;

pub use lq::{lq_value_grad, LqRecoveryObjective};
pub use onebit::{onebit_value_grad, OneBitMimoObjective};
pub use qubo::{qubo_value_grad, QuboObjective};

use crate::error::{check_dim, Result};

pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.value(x), self.gradient(x))
    }

    /// Sound over-estimate of `max_{x ∈ box} ‖∇f(x)‖∞ / 3`, if the objective
    /// can provide one in closed form.
    fn lambda_bar_bound(&self) -> Option<f64> {
        None
    }

    /// True when the bound above is attained (affine gradients).
    fn lambda_bar_is_exact(&self) -> bool {
        false
    }

    /// Upper estimate of the gradient Lipschitz constant over the box.
    fn smoothness_estimate(&self) -> Option<f64> {
        None
    }
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(x, out)
    }
    fn lambda_bar_bound(&self) -> Option<f64> {
        (**self).lambda_bar_bound()
    }
    fn lambda_bar_is_exact(&self) -> bool {
        (**self).lambda_bar_is_exact()
    }
    fn smoothness_estimate(&self) -> Option<f64> {
        (**self).smoothness_estimate()
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(x, out)
    }
    fn lambda_bar_bound(&self) -> Option<f64> {
        (**self).lambda_bar_bound()
    }
    fn lambda_bar_is_exact(&self) -> bool {
        (**self).lambda_bar_is_exact()
    }
    fn smoothness_estimate(&self) -> Option<f64> {
        (**self).smoothness_estimate()
    }
}

/// Declared `λ̄` bound of an objective (`None` when it cannot provide one).
pub fn lambda_bar_bound_for(obj: &dyn Objective) -> Option<f64> {
    obj.lambda_bar_bound()
}

pub(crate) fn check_point(obj: &dyn Objective, x: &[f64]) -> Result<()> {
    check_dim(obj.dim(), x.len())
}

/// Objective `f(x) = 0`, handy for isolating the penalty term.
#[derive(Debug, Clone, Copy)]
pub struct ZeroObjective {
    pub dim: usize,
}

impl Objective for ZeroObjective {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn gradient_into(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
    fn lambda_bar_bound(&self) -> Option<f64> {
        Some(0.0)
    }
    fn lambda_bar_is_exact(&self) -> bool {
        true
    }
    fn smoothness_estimate(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `f(x) = ½‖x − c‖²`.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    pub center: Vec<f64>,
}

impl Objective for SquaredDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>()
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), c) in out.iter_mut().zip(x).zip(&self.center) {
            *o = a - c;
        }
    }
    fn lambda_bar_bound(&self) -> Option<f64> {
        // |xᵢ − cᵢ| over xᵢ ∈ [0,1] peaks at an endpoint
        let m = self
            .center
            .iter()
            .map(|c| c.abs().max((1.0 - c).abs()))
            .fold(0.0, f64::max);
        Some(m / 3.0)
    }
    fn lambda_bar_is_exact(&self) -> bool {
        true
    }
    fn smoothness_estimate(&self) -> Option<f64> {
        Some(1.0)
    }
}
