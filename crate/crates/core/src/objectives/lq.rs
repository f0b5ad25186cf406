use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;

use super::Objective;

/// `f(x) = ½ Σᵢ |(Ax − b)ᵢ|^q`, `q > 1`.
///
/// With `q = 2` this is also the classical MIMO maximum-likelihood objective
/// on the real-stacked system.
#[derive(Debug, Clone)]
pub struct LqRecoveryObjective {
    a: Matrix,
    b: Vec<f64>,
    q: f64,
}

impl LqRecoveryObjective {
    pub fn new(a: Matrix, b: Vec<f64>, q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::param(format!("exponent q must exceed 1, got {q}")));
        }
        check_dim(a.rows(), b.len())?;
        Ok(Self { a, b, q })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn exponent(&self) -> f64 {
        self.q
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r = self.a.matvec(x);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        r
    }
}

impl Objective for LqRecoveryObjective {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = self.residual(x);
        if self.q == 2.0 {
            0.5 * r.iter().map(|v| v * v).sum::<f64>()
        } else {
            0.5 * r.iter().map(|v| v.abs().powf(self.q)).sum::<f64>()
        }
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let mut r = self.residual(x);
        if self.q != 2.0 {
            let scale = 0.5 * self.q;
            let p = self.q - 1.0;
            for v in r.iter_mut() {
                *v = scale * v.signum() * v.abs().powf(p);
            }
        }
        self.a.matvec_t_into(&r, out);
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut r = self.residual(x);
        let value;
        if self.q == 2.0 {
            value = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
        } else {
            let scale = 0.5 * self.q;
            let p = self.q - 1.0;
            let mut acc = 0.0;
            for v in r.iter_mut() {
                let a = v.abs();
                acc += a.powf(self.q);
                *v = scale * v.signum() * a.powf(p);
            }
            value = 0.5 * acc;
        }
        (value, self.a.matvec_t(&r))
    }

    /// Over the box `|rᵢ| ≤ Σⱼ|Aᵢⱼ| + |bᵢ| =: r̄ᵢ`, hence
    /// `|∇ⱼf| ≤ (q/2) Σᵢ |Aᵢⱼ| r̄ᵢ^{q−1}`.
    fn lambda_bar_bound(&self) -> Option<f64> {
        let abs_a = self.a.abs();
        let ones = vec![1.0; self.a.cols()];
        let mut rbar = abs_a.matvec(&ones);
        for (r, b) in rbar.iter_mut().zip(&self.b) {
            *r = (*r + b.abs()).powf(self.q - 1.0);
        }
        let col = abs_a.matvec_t(&rbar);
        let m = col.into_iter().fold(0.0, f64::max);
        Some(0.5 * self.q * m / 3.0)
    }

    fn smoothness_estimate(&self) -> Option<f64> {
        if self.q == 2.0 {
            // ‖A‖₂² ≤ ‖A‖₁ ‖A‖∞
            Some(self.a.max_col_abs_sum() * self.a.max_row_abs_sum())
        } else {
            None
        }
    }
}

pub fn lq_value_grad(obj: &LqRecoveryObjective, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(obj.dim(), x.len())?;
    Ok(obj.value_and_gradient(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    #[test]
    fn scalar_example() {
        let a: Matrix = DenseMatrix::identity(1).into();
        let obj = LqRecoveryObjective::new(a, vec![0.0], 1.5).unwrap();
        let (v, g) = lq_value_grad(&obj, &[1.0]).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(g, vec![0.75]);
    }

    #[test]
    fn least_squares_identity() {
        let a: Matrix = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![-1.0, 0.5], vec![3.0, 0.0]])
            .unwrap()
            .into();
        let b = vec![0.5, 1.0, -2.0];
        let obj = LqRecoveryObjective::new(a.clone(), b.clone(), 2.0).unwrap();
        let x = [0.3, 0.9];
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
        let (v, g) = obj.value_and_gradient(&x);
        assert!((v - 0.5 * r.iter().map(|t| t * t).sum::<f64>()).abs() < 1e-15);
        assert_eq!(g, a.matvec_t(&r));
        assert_eq!(obj.gradient(&x), g);
    }

    #[test]
    fn rejects_q_at_most_one() {
        let a: Matrix = DenseMatrix::identity(1).into();
        assert!(matches!(
            LqRecoveryObjective::new(a.clone(), vec![0.0], 1.0),
            Err(Error::Parameter(_))
        ));
        assert!(LqRecoveryObjective::new(a, vec![0.0, 1.0], 2.0).is_err());
    }

    #[test]
    fn bound_for_scalar_identity() {
        let a: Matrix = DenseMatrix::identity(1).into();
        let obj = LqRecoveryObjective::new(a, vec![0.0], 2.0).unwrap();
        let bound = obj.lambda_bar_bound().unwrap();
        assert!((1.0 / 3.0 - 1e-15..=2.0 / 3.0).contains(&bound));
    }
}
