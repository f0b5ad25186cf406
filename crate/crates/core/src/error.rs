use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported capability: {0}")]
    Capability(String),

    #[error("undefined metric: {0}")]
    Undefined(String),

    /// No backtracking step satisfied the sufficient-decrease test.
    #[error(
        "line search failed at iteration {iteration}: no step out of {attempts} satisfied sufficient decrease (last tau = {last_tau:e}, lambda = {lambda:e})"
    )]
    LineSearch {
        iteration: usize,
        attempts: usize,
        last_tau: f64,
        lambda: f64,
    },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("{}line {line}: {message}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn with_path(self, p: impl Into<PathBuf>) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                path: Some(p.into()),
                line,
                message,
            },
            Error::Json(e) => Error::Parse {
                path: Some(p.into()),
                line: e.line(),
                message: e.to_string(),
            },
            Error::Io(e) => Error::Instance(format!("{}: {e}", p.into().display())),
            other => other,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
