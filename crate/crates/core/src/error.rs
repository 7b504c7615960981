use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the scoring pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file content; `row` and `column` are 1-based when known.
    #[error("{path}: parse error at row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("need at least {required} points for k={k}, got {n}")]
    InsufficientPoints { n: usize, k: usize, required: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate point set: all pairwise distances are zero")]
    DegeneratePointSet,

    #[error("no scorable class: {0}")]
    NoScorableClass(String),

    #[error("undefined correlation: all values tied in {0}")]
    UndefinedCorrelation(&'static str),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("model id mismatch; unmatched ids: {}", .0.join(", "))]
    IdMismatch(Vec<String>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        row: usize,
        column: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            path: path.into(),
            row,
            column,
            message: message.into(),
        }
    }
}
