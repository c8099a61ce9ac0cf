use std::path::PathBuf;

/// Errors raised by the library and surfaced by the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("negative exponent {exponent} in multi-index {index:?}")]
    NegativeExponent { index: Vec<i64>, exponent: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsatisfiable corpus spec: {0}")]
    Unsatisfiable(String),

    #[error("root finder did not converge (degree {degree}, residual {residual:e})")]
    RootsNotConverged { degree: usize, residual: f64 },

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("no corpus member satisfies the hypotheses of `{0}`")]
    EmptyResult(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
