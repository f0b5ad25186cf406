//! Repeated solves with per-trial records and summaries.
//!
//! Trial `t` uses seed `seed + t` for both instance generation and any random
//! starting point. Trials run in parallel; results come back in trial order.

use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::appa::{solve, AppaConfig, SolveReport, Termination};
use crate::error::{Error, Result};
use crate::instances::{
    beasley, generate_mimo, generate_onebit, generate_recovery, generate_synthetic_qubo, stream_rng, Channel,
    MimoParams, OneBitParams, ProblemInstance, QuboSource, RecoveryParams, SyntheticQuboParams, Task,
};
use crate::metrics::{accuracy, bit_error_rate, brute_force_min, gap, MetricReport};
use crate::penalty::is_binary;
use crate::presets::{config_for, PresetOptions};

/// Synthetic or file-based QUBO instances up to this size get an exhaustive
/// reference optimum for the gap.
pub const BRUTE_FORCE_GAP_MAX_DIM: usize = 20;

/// Generator parameters; each task reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub q: f64,
    pub nf: f64,
    pub snr_db: f64,
    /// Channel correlation; 0 draws an iid channel.
    pub corr: f64,
    pub case_id: usize,
}

impl GenParams {
    pub fn defaults_for(task: Task) -> Self {
        let base = GenParams {
            m: 500,
            n: 1000,
            s: 100,
            q: 2.0,
            nf: 0.0,
            snr_db: 10.0,
            corr: 0.0,
            case_id: 1,
        };
        match task {
            Task::Recovery => base,
            Task::Mimo => GenParams { m: 64, n: 64, ..base },
            Task::Onebit => GenParams { m: 400, n: 200, ..base },
            Task::Qubo => GenParams { n: 100, ..base },
        }
    }

    pub fn build(&self, task: Task, seed: u64) -> Result<ProblemInstance> {
        Ok(match task {
            Task::Recovery => ProblemInstance::Recovery(generate_recovery(&RecoveryParams {
                m: self.m,
                n: self.n,
                s: self.s,
                q: self.q,
                noise_factor: self.nf,
                seed,
            })?),
            Task::Mimo => ProblemInstance::Mimo(generate_mimo(&MimoParams {
                m: self.m,
                n: self.n,
                snr_db: self.snr_db,
                channel: if self.corr == 0.0 {
                    Channel::Iid
                } else {
                    Channel::Correlated { r: self.corr }
                },
                seed,
            })?),
            Task::Onebit => ProblemInstance::Onebit(generate_onebit(&OneBitParams {
                m: self.m,
                n: self.n,
                snr_db: self.snr_db,
                seed,
            })?),
            Task::Qubo => ProblemInstance::Qubo(generate_synthetic_qubo(&SyntheticQuboParams {
                n: self.n,
                case_id: self.case_id,
                seed,
            })?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InstanceSource {
    Generate(GenParams),
    File { path: PathBuf },
    Beasley { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitPolicy {
    Zero,
    Half,
    /// Uniform on the box, drawn from the trial seed.
    Random,
}

impl InitPolicy {
    /// `Half` for QUBO, where `x = 0` is always a fixed point; `Zero` otherwise.
    pub fn default_for(task: Task) -> Self {
        if task == Task::Qubo {
            InitPolicy::Half
        } else {
            InitPolicy::Zero
        }
    }

    pub fn point(self, n: usize, seed: u64) -> Vec<f64> {
        match self {
            InitPolicy::Zero => vec![0.0; n],
            InitPolicy::Half => vec![0.5; n],
            InitPolicy::Random => {
                let mut rng = stream_rng(seed, "init");
                (0..n).map(|_| rng.random::<f64>()).collect()
            }
        }
    }
}

/// Optional replacements for preset values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigOverrides {
    pub eta: Option<f64>,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda0: Option<f64>,
    pub pi: Option<f64>,
    pub theta: Option<f64>,
    pub k0: Option<usize>,
    pub epsilon: Option<f64>,
    pub max_iters: Option<usize>,
    pub max_backtracks: Option<usize>,
    pub time_cap_secs: Option<f64>,
    pub warm_start: bool,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut AppaConfig) {
        macro_rules! set {
            ($($f:ident => $g:ident),*) => {$(if let Some(v) = self.$f { cfg.$g = v; })*};
        }
        set!(eta => eta, alpha => alpha, sigma => sigma, lambda0 => lambda0, pi => pi,
             theta => theta, k0 => k0, epsilon => epsilon, max_iters => max_iters,
             max_backtracks => max_backtracks);
        if self.time_cap_secs.is_some() {
            cfg.time_cap_secs = self.time_cap_secs;
        }
        if self.warm_start {
            cfg.warm_start_backtracking = true;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub task: Task,
    pub source: InstanceSource,
    /// Preset family; defaults to the task's own.
    pub preset: Option<Task>,
    pub preset_options: PresetOptions,
    pub overrides: ConfigOverrides,
    pub init: Option<InitPolicy>,
    pub trials: usize,
    pub seed: u64,
    pub record_time: bool,
}

impl RunSpec {
    pub fn new(task: Task, source: InstanceSource, trials: usize, seed: u64) -> Self {
        Self {
            task,
            source,
            preset: None,
            preset_options: PresetOptions::default(),
            overrides: ConfigOverrides::default(),
            init: None,
            trials,
            seed,
            record_time: false,
        }
    }

    pub fn generated(task: Task, params: GenParams, trials: usize, seed: u64) -> Self {
        Self::new(task, InstanceSource::Generate(params), trials, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if let Some(p) = self.preset {
            if p != self.task {
                return Err(Error::param(format!("preset '{p}' does not fit task '{}'", self.task)));
            }
        }
        if matches!(self.source, InstanceSource::Beasley { .. }) && self.task != Task::Qubo {
            return Err(Error::param("Beasley instances are QUBO problems"));
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    pub fn instance(&self, trial: usize) -> Result<ProblemInstance> {
        let inst = match &self.source {
            InstanceSource::Generate(p) => p.build(self.task, self.trial_seed(trial))?,
            InstanceSource::File { path } => ProblemInstance::load(path)?,
            InstanceSource::Beasley { name } => ProblemInstance::Qubo(beasley::load_named(name)?),
        };
        if inst.task() != self.task {
            return Err(Error::Instance(format!(
                "instance holds a '{}' problem, expected '{}'",
                inst.task(),
                self.task
            )));
        }
        Ok(inst)
    }

    pub fn config(&self, inst: &ProblemInstance) -> Result<AppaConfig> {
        let mut cfg = config_for(inst, self.preset_options)?;
        self.overrides.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One JSON line per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub task: Task,
    pub trial: usize,
    pub seed: u64,
    pub instance: String,
    pub n: usize,
    pub config: AppaConfig,
    pub metrics: MetricReport,
    /// Reference optimum used for the gap, if any.
    pub reference_objective: Option<f64>,
    pub report: SolveReport,
}

fn instance_label(inst: &ProblemInstance, spec: &RunSpec) -> String {
    match (inst, &spec.source) {
        (ProblemInstance::Qubo(q), _) => match &q.source {
            QuboSource::Beasley { name } => name.clone(),
            QuboSource::File { path } => path.clone(),
            QuboSource::Synthetic(p) => format!("qubo-n{}-case{}-seed{}", p.n, p.case_id, p.seed),
        },
        (_, InstanceSource::File { path }) => path.display().to_string(),
        (ProblemInstance::Recovery(r), _) => {
            let p = &r.params;
            format!(
                "recovery-m{}-n{}-s{}-q{}-nf{}-seed{}",
                p.m, p.n, p.s, p.q, p.noise_factor, p.seed
            )
        }
        (ProblemInstance::Mimo(r), _) => {
            let p = &r.params;
            format!("mimo-m{}-n{}-snr{}-seed{}", p.m, p.n, p.snr_db, p.seed)
        }
        (ProblemInstance::Onebit(r), _) => {
            let p = &r.params;
            format!("onebit-m{}-n{}-snr{}-seed{}", p.m, p.n, p.snr_db, p.seed)
        }
    }
}

/// Best known value for Beasley instances, else the exhaustive optimum for
/// small QUBOs.
pub fn reference_objective(inst: &ProblemInstance) -> Result<Option<f64>> {
    match inst {
        ProblemInstance::Qubo(q) => {
            if let Some(v) = q.best_known {
                return Ok(Some(v));
            }
            if q.dim() <= BRUTE_FORCE_GAP_MAX_DIM {
                let (_, v) = brute_force_min(&q.objective()?)?;
                return Ok(Some(v));
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

pub fn evaluate(inst: &ProblemInstance, report: &SolveReport, reference: Option<f64>) -> MetricReport {
    let truth = inst.ground_truth();
    MetricReport {
        accuracy: truth.as_ref().and_then(|t| accuracy(&report.x_final, t).ok()),
        ber: truth.as_ref().and_then(|t| bit_error_rate(&report.x_final, t).ok()),
        gap_percent: reference.and_then(|r| gap(report.objective_value, r).ok()),
        objective: report.objective_value,
        is_binary: is_binary(&report.x_final),
        stationarity_residual: report.stationarity_residual,
    }
}

/// Runs one trial; also returns the instance for callers that inspect it.
pub fn run_trial(spec: &RunSpec, trial: usize) -> Result<(TrialRecord, ProblemInstance)> {
    let inst = spec.instance(trial)?;
    let cfg = spec.config(&inst)?;
    let obj = inst.objective()?;
    let seed = spec.trial_seed(trial);
    let x0 = spec
        .init
        .unwrap_or_else(|| InitPolicy::default_for(spec.task))
        .point(inst.dim(), seed);
    let mut report = solve(obj.as_ref(), &x0, &cfg)?;
    if !spec.record_time {
        report.wall_time_secs = 0.0;
    }
    let reference = reference_objective(&inst)?;
    let metrics = evaluate(&inst, &report, reference);
    let record = TrialRecord {
        task: spec.task,
        trial,
        seed,
        instance: instance_label(&inst, spec),
        n: inst.dim(),
        config: cfg,
        metrics,
        reference_objective: reference,
        report,
    };
    Ok((record, inst))
}

pub fn run_trials(spec: &RunSpec) -> Result<Vec<TrialRecord>> {
    spec.validate()?;
    (0..spec.trials)
        .into_par_iter()
        .map(|t| run_trial(spec, t).map(|(r, _)| r))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub median: f64,
    pub mean: f64,
    pub best: f64,
}

/// Median (mean of the middle pair for even counts), mean and best.
pub fn stat(values: &[f64], lower_is_better: bool) -> Option<Stat> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    let median = if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    };
    let mean = v.iter().sum::<f64>() / k as f64;
    let best = if lower_is_better { v[0] } else { v[k - 1] };
    Some(Stat { median, mean, best })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub task: Task,
    pub trials: usize,
    pub objective: Option<Stat>,
    pub accuracy: Option<Stat>,
    pub ber: Option<Stat>,
    pub gap_percent: Option<Stat>,
    pub iterations: Option<Stat>,
    pub binary_fraction: f64,
    pub stopping_rule_fraction: f64,
}

pub fn summarize(task: Task, records: &[TrialRecord]) -> Summary {
    let collect = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Vec<f64> { records.iter().filter_map(f).collect() };
    let frac = |f: &dyn Fn(&TrialRecord) -> bool| -> f64 {
        if records.is_empty() {
            0.0
        } else {
            records.iter().filter(|r| f(r)).count() as f64 / records.len() as f64
        }
    };
    Summary {
        task,
        trials: records.len(),
        objective: stat(&collect(&|r| Some(r.metrics.objective)), true),
        accuracy: stat(&collect(&|r| r.metrics.accuracy), false),
        ber: stat(&collect(&|r| r.metrics.ber), true),
        gap_percent: stat(&collect(&|r| r.metrics.gap_percent), true),
        iterations: stat(&collect(&|r| Some(r.report.iterations as f64)), true),
        binary_fraction: frac(&|r| r.metrics.is_binary),
        stopping_rule_fraction: frac(&|r| r.report.terminated_by == Termination::StoppingRule),
    }
}
