use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, Matrix};
use crate::objectives::LqRecoveryObjective;

use super::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Channel {
    Iid,
    /// Kronecker model `H = P H̃ Q` with Toeplitz correlations `r^|i−j|`
    /// on both ends.
    Correlated {
        r: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimoParams {
    /// Receive antennas.
    pub m: usize,
    /// Transmit antennas.
    pub n: usize,
    pub snr_db: f64,
    pub channel: Channel,
    pub seed: u64,
}

impl MimoParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::param("m and n must be positive"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::param("SNR must be finite"));
        }
        if let Channel::Correlated { r } = self.channel {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::param(format!("correlation must lie in [0,1), got {r}")));
            }
        }
        Ok(())
    }
}

/// Classical MIMO detection with QPSK symbols `w* ∈ {0,1}ⁿ + i{0,1}ⁿ`,
/// real-stacked as `A = [[Re H, −Im H], [Im H, Re H]]`, `b = [Re y; Im y]`,
/// `x* = [Re w*; Im w*]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MimoInstance {
    pub params: MimoParams,
    pub h_re: DenseMatrix,
    pub h_im: DenseMatrix,
    pub a: Matrix,
    pub b: Vec<f64>,
    pub x_star: Vec<f64>,
    /// Noise standard deviation `ϱ`, with `E|εᵢ|² = ϱ²`.
    pub rho: f64,
}

impl MimoInstance {
    pub fn objective(&self) -> Result<LqRecoveryObjective> {
        LqRecoveryObjective::new(self.a.clone(), self.b.clone(), 2.0)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Symmetric Toeplitz matrix with entries `r^|i−j|`.
pub fn toeplitz_correlation(dim: usize, r: f64) -> DenseMatrix {
    let mut t = DenseMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            t.set(i, j, r.powi(i.abs_diff(j) as i32));
        }
    }
    t
}

/// Real block form `[[Re, −Im], [Im, Re]]` of a complex matrix.
pub fn real_stack(h_re: &DenseMatrix, h_im: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = (h_re.rows(), h_re.cols());
    if h_im.rows() != m || h_im.cols() != n {
        return Err(Error::Dimension {
            expected: m * n,
            got: h_im.rows() * h_im.cols(),
        });
    }
    let mut a = DenseMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let (re, im) = (h_re.get(i, j), h_im.get(i, j));
            a.set(i, j, re);
            a.set(i, j + n, -im);
            a.set(i + m, j, im);
            a.set(i + m, j + n, re);
        }
    }
    Ok(a)
}

fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> Result<DenseMatrix> {
    let data = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
        .collect();
    DenseMatrix::from_row_major(rows, cols, data)
}

/// Draws the complex channel; real and imaginary parts are returned separately.
pub fn draw_channel(m: usize, n: usize, channel: Channel, seed: u64) -> Result<(DenseMatrix, DenseMatrix)> {
    let scale = 1.0 / (m as f64).sqrt();
    let mut rng = stream_rng(seed, "mimo/channel");
    let g_re = gaussian_matrix(&mut rng, m, n, scale)?;
    let g_im = gaussian_matrix(&mut rng, m, n, scale)?;
    match channel {
        Channel::Iid => Ok((g_re, g_im)),
        Channel::Correlated { r } => {
            // real correlation matrices, so P and Q act on each part separately
            let p = toeplitz_correlation(m, r).cholesky()?;
            let q = toeplitz_correlation(n, r).cholesky()?.transpose();
            let re = p.matmul(&g_re)?.matmul(&q)?;
            let im = p.matmul(&g_im)?.matmul(&q)?;
            Ok((re, im))
        }
    }
}

pub fn generate_mimo(params: &MimoParams) -> Result<MimoInstance> {
    params.validate()?;
    let MimoParams { m, n, seed, .. } = *params;
    let (h_re, h_im) = draw_channel(m, n, params.channel, seed)?;
    let a: Matrix = real_stack(&h_re, &h_im)?.into();

    let mut rng = stream_rng(seed, "mimo/symbols");
    let x_star: Vec<f64> = (0..2 * n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { 0.0 })
        .collect();

    let signal = a.matvec(&x_star);
    let energy: f64 = signal.iter().map(|v| v * v).sum();
    let rho = (energy / (m as f64 * db_to_linear(params.snr_db))).sqrt();
    let sd = rho / std::f64::consts::SQRT_2;

    let mut rng = stream_rng(seed, "mimo/noise");
    let b = signal
        .into_iter()
        .map(|v| v + sd * rng.sample::<f64, _>(StandardNormal))
        .collect();

    Ok(MimoInstance {
        params: params.clone(),
        h_re,
        h_im,
        a,
        b,
        x_star,
        rho,
    })
}
