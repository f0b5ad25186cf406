use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;

use super::normal::{inv_mills, log_ncdf};
use super::Objective;

/// Negative log-likelihood of sign-quantized observations `y = sgn(Hz + v)`,
/// `v ~ N(0, ϱ²)`, written in the binary variable `x = (z + 1)/2`:
///
/// `f(x) = −Σᵢ log Φ(yᵢ⟨hᵢ, 2x − 1⟩ / ϱ)`.
#[derive(Debug, Clone)]
pub struct OneBitMimoObjective {
    h: Matrix,
    y: Vec<f64>,
    rho: f64,
}

impl OneBitMimoObjective {
    pub fn new(h: Matrix, y: Vec<f64>, rho: f64) -> Result<Self> {
        check_dim(h.rows(), y.len())?;
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::param(format!("noise level must be positive, got {rho}")));
        }
        if let Some(bad) = y.iter().find(|v| **v != 1.0 && **v != -1.0) {
            return Err(Error::Domain(format!("observations must be ±1, found {bad}")));
        }
        Ok(Self { h, y, rho })
    }

    pub fn channel(&self) -> &Matrix {
        &self.h
    }

    pub fn observations(&self) -> &[f64] {
        &self.y
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `uᵢ = yᵢ⟨hᵢ, 2x − 1⟩ / ϱ`
    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let mut u = self.h.matvec(&z);
        for (ui, yi) in u.iter_mut().zip(&self.y) {
            *ui *= yi / self.rho;
        }
        u
    }

    fn weights(&self, u: &[f64]) -> Vec<f64> {
        let c = -2.0 / self.rho;
        u.iter().zip(&self.y).map(|(&ui, &yi)| c * yi * inv_mills(ui)).collect()
    }
}

impl Objective for OneBitMimoObjective {
    fn dim(&self) -> usize {
        self.h.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        -self.margins(x).into_iter().map(log_ncdf).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let u = self.margins(x);
        self.h.matvec_t_into(&self.weights(&u), out);
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let u = self.margins(x);
        let v = -u.iter().map(|&t| log_ncdf(t)).sum::<f64>();
        (v, self.h.matvec_t(&self.weights(&u)))
    }

    /// `uᵢ ≥ −‖hᵢ‖₁/ϱ` on the box and the inverse Mills ratio is decreasing,
    /// so `|∇ⱼf| ≤ (2/ϱ) Σᵢ |Hᵢⱼ| R(−‖hᵢ‖₁/ϱ)`.
    fn lambda_bar_bound(&self) -> Option<f64> {
        let abs_h = self.h.abs();
        let ones = vec![1.0; self.h.cols()];
        let row_l1 = abs_h.matvec(&ones);
        let rbar: Vec<f64> = row_l1.iter().map(|s| inv_mills(-s / self.rho)).collect();
        let col = abs_h.matvec_t(&rbar);
        let m = col.into_iter().fold(0.0, f64::max);
        // relative guard against rounding in R
        Some((2.0 / self.rho) * m * (1.0 + 1e-12) / 3.0)
    }

    fn smoothness_estimate(&self) -> Option<f64> {
        // d²/du² of −log Φ lies in (0, 1)
        let n2 = self.h.max_col_abs_sum() * self.h.max_row_abs_sum();
        Some(4.0 * n2 / (self.rho * self.rho))
    }
}

pub fn onebit_value_grad(obj: &OneBitMimoObjective, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(obj.dim(), x.len())?;
    Ok(obj.value_and_gradient(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn zero_margin_gives_m_log_two() {
        // x = ½ maps to z = 0, so every margin vanishes
        let h: Matrix = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![0.5, 0.5], vec![3.0, 1.0]])
            .unwrap()
            .into();
        let obj = OneBitMimoObjective::new(h, vec![1.0, -1.0, 1.0], 0.7).unwrap();
        let v = obj.value(&[0.5, 0.5]);
        assert!((v - 3.0 * std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn large_margin_value_vanishes() {
        let h: Matrix = DenseMatrix::from_rows(&[vec![1.0]]).unwrap().into();
        let obj = OneBitMimoObjective::new(h, vec![1.0], 1e-3).unwrap();
        assert!(obj.value(&[1.0]) < 1e-300);
    }

    #[test]
    fn rejects_non_sign_observations() {
        let h: Matrix = DenseMatrix::from_rows(&[vec![1.0]]).unwrap().into();
        assert!(matches!(
            OneBitMimoObjective::new(h.clone(), vec![0.0], 1.0),
            Err(Error::Domain(_))
        ));
        assert!(OneBitMimoObjective::new(h, vec![1.0], 0.0).is_err());
    }
}
