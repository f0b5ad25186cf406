use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;

use super::Objective;

/// `f(x) = ½⟨x, Qx⟩` with symmetric `Q`.
#[derive(Debug, Clone)]
pub struct QuboObjective {
    q: Matrix,
}

impl QuboObjective {
    /// Symmetrizes `Q` as `(Q + Qᵀ)/2`, which leaves `f` unchanged.
    pub fn new(q: Matrix) -> Result<Self> {
        if q.rows() != q.cols() {
            return Err(Error::param(format!(
                "QUBO matrix must be square, got {}x{}",
                q.rows(),
                q.cols()
            )));
        }
        let q = if q.is_symmetric() { q } else { q.symmetrized()? };
        Ok(Self { q })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }

    /// Row-wise extreme of `|(Qx)ᵢ|` over the box: the larger of the positive
    /// and negative row sums.
    pub fn max_box_gradient(&self) -> f64 {
        (0..self.q.rows())
            .map(|i| {
                let (mut pos, mut neg) = (0.0f64, 0.0f64);
                self.q.for_each_in_row(i, |_, v| {
                    if v > 0.0 {
                        pos += v;
                    } else {
                        neg -= v;
                    }
                });
                pos.max(neg)
            })
            .fold(0.0, f64::max)
    }
}

impl Objective for QuboObjective {
    fn dim(&self) -> usize {
        self.q.rows()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for i in 0..self.q.rows() {
            if x[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            self.q.for_each_in_row(i, |j, q| row += q * x[j]);
            v += x[i] * row;
        }
        0.5 * v
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.q.matvec_into(x, out);
    }

    fn lambda_bar_bound(&self) -> Option<f64> {
        Some(self.max_box_gradient() / 3.0)
    }

    fn lambda_bar_is_exact(&self) -> bool {
        true
    }

    fn smoothness_estimate(&self) -> Option<f64> {
        // ‖Q‖₂ ≤ ‖Q‖∞ for symmetric Q
        Some(self.q.max_row_abs_sum())
    }
}

pub fn qubo_value_grad(q: &QuboObjective, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(q.dim(), x.len())?;
    Ok(q.value_and_gradient(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn qubo(rows: &[Vec<f64>]) -> QuboObjective {
        QuboObjective::new(DenseMatrix::from_rows(rows).unwrap().into()).unwrap()
    }

    #[test]
    fn examples() {
        let id = qubo(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(qubo_value_grad(&id, &[1.0, 1.0]).unwrap(), (1.0, vec![1.0, 1.0]));
        let swap = qubo(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(qubo_value_grad(&swap, &[1.0, 0.0]).unwrap(), (0.0, vec![0.0, 1.0]));
        assert!(matches!(
            qubo_value_grad(&swap, &[1.0]),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn asymmetric_input_is_symmetrized() {
        let q = qubo(&[vec![0.0, 2.0], vec![0.0, 0.0]]);
        assert_eq!(q.matrix().get(0, 1), 1.0);
        assert_eq!(q.matrix().get(1, 0), 1.0);
        assert_eq!(q.value(&[1.0, 1.0]), 1.0);
    }

    #[test]
    fn lambda_bar_matches_corner_enumeration() {
        // corners of [0,1]²: max ‖Qx‖∞ is 2, at (1,0) and (0,1)
        let q = qubo(&[vec![2.0, -1.0], vec![-1.0, 2.0]]);
        assert!((q.lambda_bar_bound().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let q = qubo(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!((q.lambda_bar_bound().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let q = qubo(&[vec![0.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(q.lambda_bar_bound(), Some(0.0));
    }
}
