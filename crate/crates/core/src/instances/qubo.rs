use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::objectives::QuboObjective;

use super::rng::stream_rng;

/// Fraction of nonnegative entries for synthetic cases 1 to 5.
pub const NONNEG_FRACTIONS: [f64; 5] = [0.4995, 0.4999, 0.49995, 0.49999, 0.5];

/// Synthetic instances at or above this size are drawn sparse.
pub const SPARSE_FROM: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QuboSource {
    Synthetic(SyntheticQuboParams),
    Beasley { name: String },
    File { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticQuboParams {
    pub n: usize,
    /// Case 1 to 5, selecting the nonnegative fraction.
    pub case_id: usize,
    pub seed: u64,
}

impl SyntheticQuboParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n must be positive"));
        }
        if !(1..=NONNEG_FRACTIONS.len()).contains(&self.case_id) {
            return Err(Error::param(format!("case id must lie in 1..=5, got {}", self.case_id)));
        }
        Ok(())
    }

    pub fn density(&self) -> f64 {
        if self.n >= SPARSE_FROM {
            0.005
        } else {
            0.8
        }
    }

    pub fn nonneg_fraction(&self) -> f64 {
        NONNEG_FRACTIONS[self.case_id - 1]
    }
}

/// `min ½⟨x, Qx⟩` over `{0,1}ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    pub source: QuboSource,
    /// Symmetric.
    pub q: Matrix,
    /// Best known value of `½⟨x, Qx⟩`, if any.
    pub best_known: Option<f64>,
}

impl QuboInstance {
    pub fn objective(&self) -> Result<QuboObjective> {
        QuboObjective::new(self.q.clone())
    }

    pub fn dim(&self) -> usize {
        self.q.rows()
    }
}

/// Upper-triangular positions `(i, j)`, `i ≤ j`, in row-major order.
fn upper_position(mut k: u64, n: usize) -> (usize, usize) {
    let mut i = 0;
    let mut len = n as u64;
    while k >= len {
        k -= len;
        i += 1;
        len -= 1;
    }
    (i, i + k as usize)
}

/// Random symmetric matrix: each upper-triangular entry (diagonal included)
/// is nonzero with probability `density`, has magnitude `U[10, 100]`, and is
/// nonnegative with the case's fraction.
pub fn generate_synthetic_qubo(params: &SyntheticQuboParams) -> Result<QuboInstance> {
    params.validate()?;
    let n = params.n;
    let density = params.density();
    let fraction = params.nonneg_fraction();
    let total = (n as u64) * (n as u64 + 1) / 2;

    let mut pattern = stream_rng(params.seed, "qubo/pattern");
    let mut values = stream_rng(params.seed, "qubo/values");
    let mut triplets = Vec::new();
    let mut push = |i: usize, j: usize, triplets: &mut Vec<(usize, usize, f64)>| {
        let magnitude = values.random_range(10.0..=100.0);
        let v = if values.random::<f64>() < fraction {
            magnitude
        } else {
            -magnitude
        };
        triplets.push((i, j, v));
        if i != j {
            triplets.push((j, i, v));
        }
    };

    if density >= 0.1 {
        for i in 0..n {
            for j in i..n {
                if pattern.random::<f64>() < density {
                    push(i, j, &mut triplets);
                }
            }
        }
    } else {
        // skip ahead by geometric gaps instead of testing every position
        let gaps = Geometric::new(density).map_err(|e| Error::Internal(e.to_string()))?;
        let mut k = gaps.sample(&mut pattern);
        let (mut i, mut row_start) = (0usize, 0u64);
        while k < total {
            while k - row_start >= (n - i) as u64 {
                row_start += (n - i) as u64;
                i += 1;
            }
            let j = i + (k - row_start) as usize;
            debug_assert_eq!((i, j), upper_position(k, n));
            push(i, j, &mut triplets);
            k += 1 + gaps.sample(&mut pattern);
        }
    }

    Ok(QuboInstance {
        source: QuboSource::Synthetic(params.clone()),
        q: Matrix::from_triplets(n, n, &triplets)?,
        best_known: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_positions() {
        assert_eq!(upper_position(0, 3), (0, 0));
        assert_eq!(upper_position(2, 3), (0, 2));
        assert_eq!(upper_position(3, 3), (1, 1));
        assert_eq!(upper_position(5, 3), (2, 2));
    }

    #[test]
    fn symmetric_and_in_range() {
        let inst = generate_synthetic_qubo(&SyntheticQuboParams {
            n: 30,
            case_id: 5,
            seed: 1,
        })
        .unwrap();
        assert!(inst.q.is_symmetric());
        for (_, _, v) in inst.q.triplets() {
            assert!((10.0..=100.0).contains(&v.abs()));
        }
    }

    #[test]
    fn sparse_generation_hits_density() {
        let p = SyntheticQuboParams {
            n: 10_000,
            case_id: 1,
            seed: 2,
        };
        let inst = generate_synthetic_qubo(&p).unwrap();
        let upper = inst.q.triplets().iter().filter(|(i, j, _)| i <= j).count() as f64;
        let total = 10_000.0 * 10_001.0 / 2.0;
        let sd = (total * 0.005 * 0.995f64).sqrt();
        assert!((upper - 0.005 * total).abs() < 4.0 * sd);
    }

    #[test]
    fn rejects_unknown_case() {
        let p = SyntheticQuboParams {
            n: 5,
            case_id: 6,
            seed: 0,
        };
        assert!(generate_synthetic_qubo(&p).is_err());
    }
}
