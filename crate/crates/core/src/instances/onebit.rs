use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix};
use crate::objectives::OneBitMimoObjective;

use super::mimo::db_to_linear;
use super::rng::stream_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneBitParams {
    pub m: usize,
    pub n: usize,
    pub snr_db: f64,
    pub seed: u64,
}

impl OneBitParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::param("m and n must be positive"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::param("SNR must be finite"));
        }
        Ok(())
    }
}

/// Sign-quantized MIMO: `y = sgn(H z* + v)`, `z* ∈ {−1,1}ⁿ`, `v ~ N(0, ϱ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBitInstance {
    pub params: OneBitParams,
    pub h: Matrix,
    pub y: Vec<f64>,
    pub z_star: Vec<f64>,
    pub rho: f64,
}

impl OneBitInstance {
    /// Ground truth in the binary variable `x = (z + 1)/2`.
    pub fn x_star(&self) -> Vec<f64> {
        self.z_star.iter().map(|z| (z + 1.0) / 2.0).collect()
    }

    pub fn objective(&self) -> Result<OneBitMimoObjective> {
        OneBitMimoObjective::new(self.h.clone(), self.y.clone(), self.rho)
    }
}

/// `sgn(H z + v)` with `sgn(0) = +1`.
pub fn quantize(h: &Matrix, z: &[f64], noise: &[f64]) -> Vec<f64> {
    h.matvec(z)
        .into_iter()
        .zip(noise)
        .map(|(s, v)| if s + v >= 0.0 { 1.0 } else { -1.0 })
        .collect()
}

pub fn generate_onebit(params: &OneBitParams) -> Result<OneBitInstance> {
    params.validate()?;
    let OneBitParams { m, n, seed, .. } = *params;

    let mut rng = stream_rng(seed, "onebit/channel");
    let data = (0..m * n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let h: Matrix = DenseMatrix::from_row_major(m, n, data)?.into();

    let mut rng = stream_rng(seed, "onebit/symbols");
    let z_star: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();

    let energy: f64 = h.matvec(&z_star).iter().map(|v| v * v).sum();
    let rho = (energy / (m as f64 * db_to_linear(params.snr_db))).sqrt();
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Instance(format!("degenerate noise level {rho}")));
    }

    let mut rng = stream_rng(seed, "onebit/noise");
    let noise: Vec<f64> = (0..m).map(|_| rho * rng.sample::<f64, _>(StandardNormal)).collect();
    let y = quantize(&h, &z_star, &noise);

    Ok(OneBitInstance {
        params: params.clone(),
        h,
        y,
        z_star,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_zero_is_positive() {
        let h: Matrix = DenseMatrix::from_rows(&[vec![1.0, -1.0]]).unwrap().into();
        assert_eq!(quantize(&h, &[1.0, 1.0], &[0.0]), vec![1.0]);
    }

    #[test]
    fn high_snr_is_noiseless() {
        let p = OneBitParams {
            m: 32,
            n: 8,
            snr_db: 200.0,
            seed: 5,
        };
        let inst = generate_onebit(&p).unwrap();
        let clean = quantize(&inst.h, &inst.z_star, &vec![0.0; 32]);
        assert_eq!(inst.y, clean);
    }
}
