use std::path::PathBuf;

use thiserror::Error;

use crate::trace::RunTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:e} at column {column}")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("{0} did not converge")]
    NotConverged(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty input to {0}")]
    EmptyInput(&'static str),

    #[error("{path}: row {row}, column '{column}': {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("{path}: missing column '{column}'")]
    MissingColumn { path: PathBuf, column: String },

    #[error("dataset has a single class; both labels are required")]
    SingleClass,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    /// An oracle failed mid-run; `trace` holds the rows completed before it.
    #[error("solver stopped at iteration {iteration}: {source}")]
    Interrupted {
        iteration: usize,
        #[source]
        source: Box<Error>,
        trace: Box<RunTrace>,
    },
}

impl Error {
    /// True for failures caused by input data rather than configuration or numerics.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::MissingColumn { .. }
                | Error::SingleClass
                | Error::Io { .. }
                | Error::Csv(_)
        )
    }

    pub(crate) fn dims(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            actual,
        }
    }
}
