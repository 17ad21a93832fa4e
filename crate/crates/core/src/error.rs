use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("rank mismatch: expected {expected} component(s), found {found}")]
    Rank { expected: usize, found: usize },

    #[error("field is in {found} representation, operation needs {expected}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("blow-up at t = {t}: {what}")]
    BlowUp { t: f64, what: String },

    #[error("director perturbation too large: min |w0 + phi| = {min_norm} < 1/2")]
    PerturbationTooLarge { min_norm: f64 },

    #[error("fit domain error: {0}")]
    FitDomain(String),

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("invalid value for `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("study setup: {0}")]
    StudySetup(String),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
