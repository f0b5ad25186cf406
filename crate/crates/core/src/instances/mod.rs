//! Problem generators, file formats and the [`ProblemInstance`] wrapper.

pub mod beasley;
mod mimo;
mod onebit;
mod qubo;
mod recovery;
mod rng;
mod serial;

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::objectives::Objective;
use crate::penalty::is_binary;

pub use mimo::{
    db_to_linear, draw_channel, generate_mimo, real_stack, toeplitz_correlation, Channel, MimoInstance, MimoParams,
};
pub use onebit::{generate_onebit, quantize, OneBitInstance, OneBitParams};
pub use qubo::{generate_synthetic_qubo, QuboInstance, QuboSource, SyntheticQuboParams, NONNEG_FRACTIONS};
pub use recovery::{generate_recovery, RecoveryInstance, RecoveryParams};
pub use rng::stream_rng;

use serial::{Array, InstanceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Qubo,
    Recovery,
    Mimo,
    Onebit,
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Task::Qubo => "qubo",
            Task::Recovery => "recovery",
            Task::Mimo => "mimo",
            Task::Onebit => "onebit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemInstance {
    Qubo(QuboInstance),
    Recovery(RecoveryInstance),
    Mimo(MimoInstance),
    Onebit(OneBitInstance),
}

#[derive(Serialize, Deserialize)]
struct QuboMeta {
    source: QuboSource,
    best_known: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct NoisyMeta<P> {
    #[serde(flatten)]
    params: P,
    rho: f64,
}

fn check_ground_truth(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::Instance(format!(
            "ground truth has length {}, expected {n}",
            x.len()
        )));
    }
    if !is_binary(x) {
        return Err(Error::Instance("ground truth is not binary".into()));
    }
    Ok(())
}

impl ProblemInstance {
    pub fn task(&self) -> Task {
        match self {
            ProblemInstance::Qubo(_) => Task::Qubo,
            ProblemInstance::Recovery(_) => Task::Recovery,
            ProblemInstance::Mimo(_) => Task::Mimo,
            ProblemInstance::Onebit(_) => Task::Onebit,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ProblemInstance::Qubo(i) => i.q.rows(),
            ProblemInstance::Recovery(i) => i.a.cols(),
            ProblemInstance::Mimo(i) => i.a.cols(),
            ProblemInstance::Onebit(i) => i.h.cols(),
        }
    }

    pub fn objective(&self) -> Result<Box<dyn Objective>> {
        Ok(match self {
            ProblemInstance::Qubo(i) => Box::new(i.objective()?),
            ProblemInstance::Recovery(i) => Box::new(i.objective()?),
            ProblemInstance::Mimo(i) => Box::new(i.objective()?),
            ProblemInstance::Onebit(i) => Box::new(i.objective()?),
        })
    }

    /// Planted binary solution, when the instance has one.
    pub fn ground_truth(&self) -> Option<Vec<f64>> {
        match self {
            ProblemInstance::Qubo(_) => None,
            ProblemInstance::Recovery(i) => Some(i.x_star.clone()),
            ProblemInstance::Mimo(i) => Some(i.x_star.clone()),
            ProblemInstance::Onebit(i) => Some(i.x_star()),
        }
    }

    pub fn best_known(&self) -> Option<f64> {
        match self {
            ProblemInstance::Qubo(i) => i.best_known,
            _ => None,
        }
    }

    /// Structural checks: symmetry, dimensions, binary ground truth, block
    /// structure of stacked channels and sign observations.
    pub fn validate(&self) -> Result<()> {
        match self {
            ProblemInstance::Qubo(i) => {
                if i.q.rows() != i.q.cols() || !i.q.is_symmetric() {
                    return Err(Error::Instance("QUBO matrix must be square and symmetric".into()));
                }
            }
            ProblemInstance::Recovery(i) => {
                i.params.validate()?;
                if (i.a.rows(), i.a.cols()) != (i.params.m, i.params.n) || i.b.len() != i.params.m {
                    return Err(Error::Instance("recovery data does not match its declared size".into()));
                }
                check_ground_truth(&i.x_star, i.params.n)?;
                let ones = i.x_star.iter().filter(|v| **v == 1.0).count();
                if ones != i.params.s {
                    return Err(Error::Instance(format!(
                        "ground truth has {ones} ones, expected {}",
                        i.params.s
                    )));
                }
            }
            ProblemInstance::Mimo(i) => {
                i.params.validate()?;
                let (m, n) = (i.params.m, i.params.n);
                if (i.h_re.rows(), i.h_re.cols()) != (m, n) || i.b.len() != 2 * m {
                    return Err(Error::Instance("MIMO data does not match its declared size".into()));
                }
                let stacked: Matrix = real_stack(&i.h_re, &i.h_im)?.into();
                if stacked != i.a {
                    return Err(Error::Instance(
                        "stacked matrix does not have the [[Re, -Im], [Im, Re]] structure".into(),
                    ));
                }
                check_ground_truth(&i.x_star, 2 * n)?;
            }
            ProblemInstance::Onebit(i) => {
                i.params.validate()?;
                if (i.h.rows(), i.h.cols()) != (i.params.m, i.params.n) || i.y.len() != i.params.m {
                    return Err(Error::Instance("one-bit data does not match its declared size".into()));
                }
                if i.y.iter().any(|v| *v != 1.0 && *v != -1.0) {
                    return Err(Error::Instance("observations must be ±1".into()));
                }
                if i.z_star.iter().any(|v| *v != 1.0 && *v != -1.0) || i.z_star.len() != i.params.n {
                    return Err(Error::Instance("symbols must be ±1".into()));
                }
                if !(i.rho > 0.0) {
                    return Err(Error::Instance("noise level must be positive".into()));
                }
            }
        }
        Ok(())
    }

    fn to_file(&self) -> Result<InstanceFile> {
        let mut arrays = BTreeMap::new();
        let params = match self {
            ProblemInstance::Qubo(i) => {
                arrays.insert("Q".into(), Array::matrix(&i.q));
                serde_json::to_value(QuboMeta {
                    source: i.source.clone(),
                    best_known: i.best_known,
                })?
            }
            ProblemInstance::Recovery(i) => {
                arrays.insert("A".into(), Array::matrix(&i.a));
                arrays.insert("b".into(), Array::vector(&i.b));
                arrays.insert("x_star".into(), Array::vector(&i.x_star));
                serde_json::to_value(&i.params)?
            }
            ProblemInstance::Mimo(i) => {
                arrays.insert("H_re".into(), Array::dense(&i.h_re));
                arrays.insert("H_im".into(), Array::dense(&i.h_im));
                arrays.insert("b".into(), Array::vector(&i.b));
                arrays.insert("x_star".into(), Array::vector(&i.x_star));
                serde_json::to_value(NoisyMeta {
                    params: i.params.clone(),
                    rho: i.rho,
                })?
            }
            ProblemInstance::Onebit(i) => {
                arrays.insert("H".into(), Array::matrix(&i.h));
                arrays.insert("y".into(), Array::vector(&i.y));
                arrays.insert("z_star".into(), Array::vector(&i.z_star));
                serde_json::to_value(NoisyMeta {
                    params: i.params.clone(),
                    rho: i.rho,
                })?
            }
        };
        Ok(InstanceFile {
            format: serial::FORMAT.into(),
            version: serial::VERSION,
            task: self.task(),
            params,
            arrays,
        })
    }

    fn from_file(f: InstanceFile) -> Result<Self> {
        f.check_header()?;
        let inst = match f.task {
            Task::Qubo => {
                let meta: QuboMeta = serde_json::from_value(f.params.clone())?;
                ProblemInstance::Qubo(QuboInstance {
                    source: meta.source,
                    q: f.array("Q")?.to_matrix()?,
                    best_known: meta.best_known,
                })
            }
            Task::Recovery => ProblemInstance::Recovery(RecoveryInstance {
                params: serde_json::from_value(f.params.clone())?,
                a: f.array("A")?.to_matrix()?,
                b: f.array("b")?.to_vector()?,
                x_star: f.array("x_star")?.to_vector()?,
            }),
            Task::Mimo => {
                let meta: NoisyMeta<MimoParams> = serde_json::from_value(f.params.clone())?;
                let h_re = f.array("H_re")?.to_dense()?;
                let h_im = f.array("H_im")?.to_dense()?;
                ProblemInstance::Mimo(MimoInstance {
                    params: meta.params,
                    a: real_stack(&h_re, &h_im)?.into(),
                    h_re,
                    h_im,
                    b: f.array("b")?.to_vector()?,
                    x_star: f.array("x_star")?.to_vector()?,
                    rho: meta.rho,
                })
            }
            Task::Onebit => {
                let meta: NoisyMeta<OneBitParams> = serde_json::from_value(f.params.clone())?;
                ProblemInstance::Onebit(OneBitInstance {
                    params: meta.params,
                    h: f.array("H")?.to_matrix()?,
                    y: f.array("y")?.to_vector()?,
                    z_star: f.array("z_star")?.to_vector()?,
                    rho: meta.rho,
                })
            }
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn write_json(&self, w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.to_file()?)?;
        Ok(())
    }

    pub fn read_json(r: impl Read) -> Result<Self> {
        Self::from_file(serde_json::from_reader(r)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::from(e).with_path(path))?;
        let mut w = std::io::BufWriter::new(f);
        self.write_json(&mut w)?;
        w.flush()?;
        Ok(())
    }

    /// Reads a native JSON instance, or a Beasley text file (first instance).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).with_path(path))?;
        if text.trim_start().starts_with('{') {
            let file = serde_json::from_str(&text).map_err(|e| Error::from(e).with_path(path))?;
            return Self::from_file(file).map_err(|e| e.with_path(path));
        }
        let mut all = beasley::load_beasley(path)?;
        let single = all.len() == 1;
        if let Some(q) = all.first_mut().filter(|_| single) {
            if q.best_known.is_none() {
                q.source = QuboSource::File {
                    path: path.display().to_string(),
                };
            }
        }
        if all.len() != 1 {
            return Err(Error::Instance(format!(
                "{} holds {} instances; select one by name",
                path.display(),
                all.len()
            )));
        }
        Ok(ProblemInstance::Qubo(all.remove(0)))
    }
}
