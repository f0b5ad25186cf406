//! Binary optimization by a cubic penalty and an adaptive proximal point method.
//!
//! Problems `min f(x)` over `x ∈ {0,1}ⁿ` are relaxed to the box `[0,1]ⁿ` and
//! penalized with `λ p(x)`, where `p` is a cubic that vanishes exactly on the
//! binary points. [`appa::solve`] alternates box-constrained proximal gradient
//! steps with a growing penalty until the iterate is binary and stationary.
//!
//! ```
//! use binopt::prelude::*;
//!
//! let q = DenseMatrix::from_rows(&[vec![-2.0, 1.0], vec![1.0, -2.0]]).unwrap();
//! let obj = QuboObjective::new(q.into()).unwrap();
//! let report = solve(&obj, &[0.5, 0.5], &AppaConfig::default()).unwrap();
//! assert!(report.is_binary());
//! assert_eq!(report.objective_value, -1.0);
//! ```

// `!(v > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appa;
pub mod cli;
pub mod cubic;
pub mod error;
pub mod experiment;
pub mod instances;
pub mod linalg;
pub mod metrics;
pub mod objectives;
pub mod penalty;
pub mod presets;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::appa::{solve, solve_observed, AppaConfig, SolveReport, Termination};
    pub use crate::cubic::{g_value, p_value, prox_scalar, prox_vector};
    pub use crate::error::{Error, Result};
    pub use crate::linalg::{CsrMatrix, DenseMatrix, Matrix};
    pub use crate::metrics::{accuracy, bit_error_rate, brute_force_min, gap};
    pub use crate::objectives::{LqRecoveryObjective, Objective, OneBitMimoObjective, QuboObjective};
    pub use crate::penalty::{lambda_bar, penalty_value, stationarity_check, BoxVector};
}
