use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix};
use crate::objectives::LqRecoveryObjective;

use super::rng::stream_rng;

/// Above this dimension the sensing matrix is left unnormalized.
pub const NORMALIZE_UP_TO: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryParams {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub q: f64,
    pub noise_factor: f64,
    pub seed: u64,
}

impl RecoveryParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::param("m and n must be positive"));
        }
        if self.s == 0 || self.s > self.n {
            return Err(Error::param(format!(
                "sparsity must lie in 1..={}, got {}",
                self.n, self.s
            )));
        }
        if !(self.q > 1.0) || !self.q.is_finite() {
            return Err(Error::param(format!("q must exceed 1, got {}", self.q)));
        }
        if !(self.noise_factor >= 0.0) || !self.noise_factor.is_finite() {
            return Err(Error::param(format!(
                "noise factor must be nonnegative, got {}",
                self.noise_factor
            )));
        }
        Ok(())
    }
}

/// Sparse binary signal recovery: `b = A x* + nf·ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryInstance {
    pub params: RecoveryParams,
    pub a: Matrix,
    pub b: Vec<f64>,
    pub x_star: Vec<f64>,
}

impl RecoveryInstance {
    pub fn objective(&self) -> Result<LqRecoveryObjective> {
        LqRecoveryObjective::new(self.a.clone(), self.b.clone(), self.params.q)
    }
}

pub fn generate_recovery(params: &RecoveryParams) -> Result<RecoveryInstance> {
    params.validate()?;
    let RecoveryParams { m, n, s, seed, .. } = *params;
    let scale = if n <= NORMALIZE_UP_TO {
        1.0 / (m as f64).sqrt()
    } else {
        1.0
    };

    let mut rng = stream_rng(seed, "recovery/matrix");
    let data: Vec<f64> = (0..m * n)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
        .collect();
    let a: Matrix = DenseMatrix::from_row_major(m, n, data)?.into();

    let mut rng = stream_rng(seed, "recovery/support");
    let mut x_star = vec![0.0; n];
    for i in sample(&mut rng, n, s) {
        x_star[i] = 1.0;
    }

    let mut rng = stream_rng(seed, "recovery/noise");
    let mut b = a.matvec(&x_star);
    for bi in b.iter_mut() {
        let e: f64 = rng.sample(StandardNormal);
        *bi += params.noise_factor * e;
    }

    Ok(RecoveryInstance {
        params: params.clone(),
        a,
        b,
        x_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RecoveryParams {
        RecoveryParams {
            m: 20,
            n: 40,
            s: 5,
            q: 2.0,
            noise_factor: 0.0,
            seed: 3,
        }
    }

    #[test]
    fn support_and_noiseless_rhs() {
        let inst = generate_recovery(&params()).unwrap();
        assert_eq!(inst.x_star.iter().filter(|v| **v == 1.0).count(), 5);
        assert_eq!(inst.b, inst.a.matvec(&inst.x_star));
    }

    #[test]
    fn rejects_bad_sparsity() {
        let p = RecoveryParams { s: 41, ..params() };
        assert!(matches!(generate_recovery(&p), Err(Error::Parameter(_))));
    }
}
