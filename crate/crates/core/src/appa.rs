//! Adaptive proximal point algorithm.
//!
//! Each outer iteration `k` takes a box-constrained proximal gradient step
//!
//! ```text
//! x⁺ ∈ Prox^B_{τλₖp}(xᵏ − τ∇f(xᵏ)),   τ = η αˢ,
//! ```
//!
//! with the smallest `s ≥ 0` giving `F(x⁺;λₖ) ≤ F(xᵏ;λₖ) − (σ/2)‖x⁺ − xᵏ‖²`.
//! The run stops once `xᵏ` is binary and `‖xᵏ − x⁺‖ < ε`; otherwise `λ` is
//! multiplied by `π` every `k₀` iterations while it is below `θ`.

use std::time::Instant;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::cubic::{p_value, prox_vector_into};
use crate::error::{Error, Result};
use crate::linalg::dist2;
use crate::objectives::{check_point, Objective};
use crate::penalty::{is_binary, stationarity_check, BoxVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppaConfig {
    /// Initial step scale η.
    pub eta: f64,
    /// Backtracking factor α ∈ (0,1).
    pub alpha: f64,
    /// Sufficient-decrease constant σ.
    pub sigma: f64,
    /// Initial penalty λ₀.
    pub lambda0: f64,
    /// Penalty growth factor π > 1.
    pub pi: f64,
    /// Penalty growth stops once λ reaches θ.
    pub theta: f64,
    /// Penalty update period k₀.
    pub k0: usize,
    /// Stopping tolerance ε ∈ (0,1).
    pub epsilon: f64,
    pub max_iters: usize,
    pub max_backtracks: usize,
    pub time_cap_secs: Option<f64>,
    /// Start each line search from `s_{k−1} − 1` instead of 0.
    #[serde(default)]
    pub warm_start_backtracking: bool,
    /// Relative rounding allowance in the decrease test: a trial point is
    /// accepted when `F⁺ ≤ F − (σ/2)‖x⁺ − x‖² + slack·max(1, |F|)`. Near an
    /// interior stationary point both sides agree to the last few ulps and
    /// the exact comparison can fail for every step size.
    #[serde(default = "default_slack")]
    pub decrease_slack: f64,
}

fn default_slack() -> f64 {
    1e-12
}

impl Default for AppaConfig {
    fn default() -> Self {
        Self {
            eta: 1.0,
            alpha: 0.25,
            sigma: 1e-8,
            lambda0: 0.25,
            pi: 1.5,
            theta: 100.0,
            k0: 100,
            epsilon: 1e-4,
            max_iters: 1_000_000,
            max_backtracks: 60,
            time_cap_secs: None,
            warm_start_backtracking: false,
            decrease_slack: default_slack(),
        }
    }
}

impl AppaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eta", self.eta),
            ("sigma", self.sigma),
            ("lambda0", self.lambda0),
            ("theta", self.theta),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.pi > 1.0) || !self.pi.is_finite() {
            return Err(Error::param(format!("pi must exceed 1, got {}", self.pi)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::param(format!("epsilon must lie in (0,1), got {}", self.epsilon)));
        }
        if self.k0 == 0 || self.max_iters == 0 || self.max_backtracks == 0 {
            return Err(Error::param("k0, max_iters and max_backtracks must be positive"));
        }
        if !(self.decrease_slack >= 0.0) || !self.decrease_slack.is_finite() {
            return Err(Error::param(format!(
                "decrease slack must be nonnegative, got {}",
                self.decrease_slack
            )));
        }
        if let Some(t) = self.time_cap_secs {
            if !(t > 0.0) {
                return Err(Error::param(format!("time cap must be positive, got {t}")));
            }
        }
        Ok(())
    }

    /// Upper bound on any penalty value the schedule can reach.
    pub fn lambda_ceiling(&self) -> f64 {
        self.lambda0.max(self.pi * self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    StoppingRule,
    MaxIters,
    TimeCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub x_final: Vec<f64>,
    /// `f(x_final)`
    pub objective_value: f64,
    /// `F(x_final; λ)` at the final penalty level.
    pub penalty_value: f64,
    pub iterations: usize,
    pub backtrack_counts: Vec<usize>,
    pub lambda_trace: Vec<f64>,
    pub tau_trace: Vec<f64>,
    pub stationarity_residual: f64,
    pub terminated_by: Termination,
    pub wall_time_secs: f64,
}

impl SolveReport {
    pub fn is_binary(&self) -> bool {
        is_binary(&self.x_final)
    }

    pub fn final_lambda(&self) -> Option<f64> {
        self.lambda_trace.last().copied()
    }

    pub fn final_tau(&self) -> Option<f64> {
        self.tau_trace.last().copied()
    }
}

/// Everything that happened in one accepted outer iteration; handed to the
/// observer of [`solve_observed`].
#[derive(Debug)]
pub struct IterationRecord<'a> {
    pub k: usize,
    pub lambda: f64,
    pub tau: f64,
    pub backtracks: usize,
    pub penalty_before: f64,
    pub penalty_after: f64,
    pub x: &'a [f64],
    pub x_next: &'a [f64],
}

impl IterationRecord<'_> {
    pub fn step_norm(&self) -> f64 {
        dist2(self.x, self.x_next)
    }

    /// Sufficient decrease, up to the configured rounding slack.
    pub fn sufficient_decrease_holds(&self, cfg: &AppaConfig) -> bool {
        let d = self.step_norm();
        sufficient_decrease(self.penalty_before, self.penalty_after, d, cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub x_next: Vec<f64>,
    pub tau: f64,
    pub backtracks: usize,
    pub penalty_before: f64,
    pub penalty_after: f64,
}

struct Workspace {
    grad: Vec<f64>,
    shifted: Vec<f64>,
    trial: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            grad: vec![0.0; n],
            shifted: vec![0.0; n],
            trial: vec![0.0; n],
        }
    }
}

/// `F⁺ ≤ F − (σ/2)d² + slack·max(1, |F|)`
#[inline]
pub fn sufficient_decrease(f_before: f64, f_after: f64, step: f64, cfg: &AppaConfig) -> bool {
    let allowance = cfg.decrease_slack * f_before.abs().max(1.0);
    f_after <= f_before - 0.5 * cfg.sigma * step * step + allowance
}

#[inline]
fn penalty(obj: &dyn Objective, x: &[f64], lambda: f64) -> f64 {
    obj.value(x) + lambda * p_value(x)
}

/// Backtracking search over `s = s_start, s_start+1, …`; the accepted point is
/// left in `ws.trial`. `ws.grad` must hold `∇f(x)`.
#[allow(clippy::too_many_arguments)]
fn line_search(
    obj: &dyn Objective,
    x: &[f64],
    f_x: f64,
    lambda: f64,
    cfg: &AppaConfig,
    s_start: usize,
    iteration: usize,
    ws: &mut Workspace,
) -> Result<(f64, usize, f64)> {
    let mut tau = cfg.eta * cfg.alpha.powi(s_start as i32);
    for s in s_start..=cfg.max_backtracks {
        for ((z, &xi), &gi) in ws.shifted.iter_mut().zip(x).zip(&ws.grad) {
            *z = xi - tau * gi;
        }
        prox_vector_into(&ws.shifted, tau * lambda, &mut ws.trial)?;
        let f_trial = penalty(obj, &ws.trial, lambda);
        if sufficient_decrease(f_x, f_trial, dist2(&ws.trial, x), cfg) {
            return Ok((tau, s, f_trial));
        }
        tau *= cfg.alpha;
    }
    Err(Error::LineSearch {
        iteration,
        attempts: cfg.max_backtracks + 1 - s_start.min(cfg.max_backtracks),
        last_tau: tau / cfg.alpha,
        lambda,
    })
}

/// One outer iteration from `x` at penalty level `lambda`.
pub fn appa_step(x: &[f64], obj: &dyn Objective, lambda: f64, cfg: &AppaConfig) -> Result<StepOutcome> {
    cfg.validate()?;
    check_point(obj, x)?;
    crate::penalty::check_box(x)?;
    if !(lambda > 0.0) {
        return Err(Error::param(format!("lambda must be positive, got {lambda}")));
    }
    let mut ws = Workspace::new(x.len());
    obj.gradient_into(x, &mut ws.grad);
    let f_x = penalty(obj, x, lambda);
    let (tau, backtracks, f_next) = line_search(obj, x, f_x, lambda, cfg, 0, 0, &mut ws)?;
    Ok(StepOutcome {
        x_next: ws.trial,
        tau,
        backtracks,
        penalty_before: f_x,
        penalty_after: f_next,
    })
}

/// `π λₖ` when `(k+1) mod k₀ = 0` and `λₖ < θ`, else `λₖ`.
pub fn lambda_schedule(k: usize, lambda_k: f64, cfg: &AppaConfig) -> f64 {
    if (k + 1).is_multiple_of(cfg.k0) && lambda_k < cfg.theta {
        cfg.pi * lambda_k
    } else {
        lambda_k
    }
}

/// `x` is binary and `‖x − x_next‖₂ < ε`.
pub fn stopping_check(x: &[f64], x_next: &[f64], cfg: &AppaConfig) -> bool {
    is_binary(x) && dist2(x, x_next) < cfg.epsilon
}

pub fn solve(obj: &dyn Objective, x0: &[f64], cfg: &AppaConfig) -> Result<SolveReport> {
    solve_observed(obj, x0, cfg, |_| {})
}

/// [`solve`] with a callback invoked after every accepted step.
pub fn solve_observed<F>(obj: &dyn Objective, x0: &[f64], cfg: &AppaConfig, mut observe: F) -> Result<SolveReport>
where
    F: FnMut(&IterationRecord<'_>),
{
    cfg.validate()?;
    check_point(obj, x0)?;
    let start = Instant::now();

    let x0 = match BoxVector::new(x0.to_vec()) {
        Ok(x) => x,
        Err(_) => {
            warn!("initial point leaves the unit box; clamping");
            BoxVector::clamped(x0.to_vec())
        }
    };
    let mut x = x0.into_inner();
    let n = x.len();
    let mut ws = Workspace::new(n);

    let mut lambda = cfg.lambda0;
    let mut backtrack_counts = Vec::new();
    let mut lambda_trace = Vec::new();
    let mut tau_trace = Vec::new();
    let mut prev_s = 0usize;
    let mut terminated_by = Termination::MaxIters;

    for k in 0..cfg.max_iters {
        obj.gradient_into(&x, &mut ws.grad);
        let f_x = penalty(obj, &x, lambda);
        let s_start = if cfg.warm_start_backtracking {
            prev_s.saturating_sub(1)
        } else {
            0
        };
        let (tau, s, f_next) = line_search(obj, &x, f_x, lambda, cfg, s_start, k, &mut ws)?;
        prev_s = s;
        backtrack_counts.push(s);
        lambda_trace.push(lambda);
        tau_trace.push(tau);

        let record = IterationRecord {
            k,
            lambda,
            tau,
            backtracks: s,
            penalty_before: f_x,
            penalty_after: f_next,
            x: &x,
            x_next: &ws.trial,
        };
        debug_assert!(record.sufficient_decrease_holds(cfg));
        observe(&record);

        if stopping_check(&x, &ws.trial, cfg) {
            terminated_by = Termination::StoppingRule;
            break;
        }
        lambda = lambda_schedule(k, lambda, cfg);
        std::mem::swap(&mut x, &mut ws.trial);

        if let Some(cap) = cfg.time_cap_secs {
            if start.elapsed().as_secs_f64() >= cap {
                terminated_by = Termination::TimeCap;
                break;
            }
        }
    }

    let last_lambda = *lambda_trace.last().expect("at least one iteration runs");
    let last_tau = *tau_trace.last().expect("at least one iteration runs");
    // After a non-stopping exit λ may have been bumped for the next iteration.
    let report_lambda = if terminated_by == Termination::StoppingRule {
        last_lambda
    } else {
        lambda
    };
    let cert = stationarity_check(&x, obj, last_tau, report_lambda)?;
    let objective_value = obj.value(&x);
    Ok(SolveReport {
        objective_value,
        penalty_value: objective_value + report_lambda * p_value(&x),
        iterations: lambda_trace.len(),
        backtrack_counts,
        lambda_trace,
        tau_trace,
        stationarity_residual: cert.residual,
        terminated_by,
        wall_time_secs: start.elapsed().as_secs_f64(),
        x_final: x,
    })
}
