//! Parameter presets for the four problem families.
//!
//! The matrix norm entering `θ` is the largest absolute entry by default;
//! [`MatrixNorm::MaxRowSum`] selects the induced ∞-norm instead.
//!
//! The experimental `θ` values can sit far below the level needed for
//! finite termination, `θ ≥ λ̄ + (σ + L)/(3α)`; one-bit detection at high
//! SNR then stalls at a non-binary stationary point forever. With
//! [`ThetaRule::Safeguarded`] (the default) `θ` is raised to that level
//! whenever the objective declares both `λ̄` and `L`.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::appa::AppaConfig;
use crate::error::Result;
use crate::instances::ProblemInstance;
use crate::linalg::{norm_inf, Matrix};
use crate::objectives::Objective;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixNorm {
    #[default]
    MaxAbs,
    MaxRowSum,
}

impl MatrixNorm {
    pub fn apply(self, m: &Matrix) -> f64 {
        match self {
            MatrixNorm::MaxAbs => m.max_abs(),
            MatrixNorm::MaxRowSum => m.max_row_abs_sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaRule {
    /// Keep the preset `θ` as is.
    Preset,
    /// `max(θ, λ̄ + (σ + L)/(3α))`.
    #[default]
    Safeguarded,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetOptions {
    pub norm: MatrixNorm,
    pub theta_rule: ThetaRule,
}

/// `λ̄ + (σ + L)/(3α)`, when the objective provides both bounds.
pub fn termination_theta(obj: &dyn Objective, cfg: &AppaConfig) -> Option<f64> {
    let lambda_bar = obj.lambda_bar_bound()?;
    let l = obj.smoothness_estimate()?;
    Some(lambda_bar + (cfg.sigma + l) / (3.0 * cfg.alpha))
}

pub fn apply_theta_rule(cfg: &mut AppaConfig, obj: &dyn Objective, rule: ThetaRule) {
    if rule == ThetaRule::Preset {
        return;
    }
    if let Some(t) = termination_theta(obj, cfg) {
        if t > cfg.theta {
            debug!("raising theta from {} to {t}", cfg.theta);
            cfg.theta = t;
        }
    }
}

/// Starting ratio for `λ₀ = r ‖bᵀA‖∞` in sparse recovery.
pub fn recovery_lambda_ratio(m: usize, n: usize, s: usize) -> f64 {
    if 2 * m <= n && n < 10 * s {
        let exponent = 4.0 * (s as f64).sqrt() / ((m * n) as f64).log2();
        0.01f64.min(0.1f64.powf(exponent))
    } else {
        0.05
    }
}

fn base(eta: f64, alpha: f64, pi: f64, k0: usize, theta: f64, lambda0: f64) -> AppaConfig {
    AppaConfig {
        eta,
        alpha,
        sigma: 1e-8,
        lambda0,
        pi,
        theta,
        k0,
        ..AppaConfig::default()
    }
}

pub fn recovery_config(a: &Matrix, b: &[f64], s: usize, norm: MatrixNorm) -> AppaConfig {
    let (m, n) = (a.rows(), a.cols());
    let k0 = if n < 10_000 { 100 } else { 50 };
    let theta = norm.apply(a) + norm_inf(b);
    let lambda0 = recovery_lambda_ratio(m, n, s) * norm_inf(&a.matvec_t(b));
    base(1.0, 0.25, 1.5, k0, theta, lambda0)
}

pub fn mimo_config(a: &Matrix, b: &[f64], norm: MatrixNorm) -> AppaConfig {
    let theta = norm.apply(a) + norm_inf(b);
    let lambda0 = 0.01 * norm_inf(&a.matvec_t(b));
    base(2.0, 0.25, 1.25, 10, theta, lambda0)
}

pub fn onebit_config(h: &Matrix, y: &[f64], norm: MatrixNorm) -> AppaConfig {
    let theta = norm.apply(h) + norm_inf(y);
    let lambda0 = 0.005 * norm_inf(&h.matvec_t(y));
    base(0.1, 0.5, 1.2, 10, theta, lambda0)
}

pub fn qubo_config(q: &Matrix, norm: MatrixNorm) -> AppaConfig {
    base(1.0, 0.25, 1.5, 100, norm.apply(q), 0.001 * q.frobenius())
}

/// The preset matching an instance's family, with the `θ` rule applied.
pub fn config_for(inst: &ProblemInstance, opts: PresetOptions) -> Result<AppaConfig> {
    let norm = opts.norm;
    let mut cfg = match inst {
        ProblemInstance::Qubo(i) => qubo_config(&i.q, norm),
        ProblemInstance::Recovery(i) => recovery_config(&i.a, &i.b, i.params.s, norm),
        ProblemInstance::Mimo(i) => mimo_config(&i.a, &i.b, norm),
        ProblemInstance::Onebit(i) => onebit_config(&i.h, &i.y, norm),
    };
    apply_theta_rule(&mut cfg, inst.objective()?.as_ref(), opts.theta_rule);
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovery_ratio_regimes() {
        assert_eq!(recovery_lambda_ratio(500, 1000, 100), 0.05);
        // 2m ≤ n < 10s: r = min(0.01, 0.1^{4·√s / log₂(mn)})
        let r = recovery_lambda_ratio(100, 1000, 200);
        let want = 0.01f64.min(0.1f64.powf(4.0 * 200f64.sqrt() / (100_000f64).log2()));
        assert_eq!(r, want);
        assert!(r <= 0.01);
    }

    #[test]
    fn qubo_preset_values() {
        let q = Matrix::from_triplets(2, 2, &[(0, 0, 3.0), (0, 1, -4.0), (1, 0, -4.0)]).unwrap();
        let c = qubo_config(&q, MatrixNorm::MaxAbs);
        assert_eq!(c.theta, 4.0);
        assert!((c.lambda0 - 0.001 * 41f64.sqrt()).abs() < 1e-15);
        assert_eq!(qubo_config(&q, MatrixNorm::MaxRowSum).theta, 7.0);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn safeguard_only_raises_theta() {
        use crate::objectives::QuboObjective;
        let q = Matrix::from_triplets(2, 2, &[(0, 1, -4.0), (1, 0, -4.0)]).unwrap();
        let obj = QuboObjective::new(q.clone()).unwrap();
        let mut c = qubo_config(&q, MatrixNorm::MaxAbs);
        apply_theta_rule(&mut c, &obj, ThetaRule::Preset);
        assert_eq!(c.theta, 4.0);
        // λ̄ = 4/3, L = 4, α = 1/4
        apply_theta_rule(&mut c, &obj, ThetaRule::Safeguarded);
        assert!((c.theta - (4.0 / 3.0 + (1e-8 + 4.0) / 0.75)).abs() < 1e-12);
    }
}
