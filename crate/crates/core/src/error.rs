use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("radial grid needs at least 3 nodes, got {0}")]
    TooFewPoints(usize),
    #[error("bad domain: {0}")]
    BadDomain(String),
    #[error(
        "theta resolution {n_theta} cannot represent modes up to {k_max} (need at least {need})"
    )]
    ResolutionTooLow {
        n_theta: usize,
        k_max: usize,
        need: usize,
    },
    #[error("tridiagonal solve broke down at row {0}")]
    SingularSystem(usize),
    #[error("initial bump center r0={0} lies outside the open interval (1, R)")]
    BadCenter(f64),
    #[error("derived fields are stale; re-solve c and phi before evaluating tendencies")]
    InconsistentState,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-positive value {value} at sample {index} inside the fit window")]
    NonPositiveValues { index: usize, value: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("missing required key `{0}`")]
    MissingRequired(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
