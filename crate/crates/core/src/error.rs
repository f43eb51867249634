//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A malformed value or inconsistent row in an input file. `row` is the
    /// 1-based data row index, not counting a header row.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// The input as a whole cannot yield a usable stream schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// Arguments or configuration that violate a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A feature vector whose width does not match the schema.
    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A consistency check failed mid-run: the computed state contradicts
    /// an invariant the run is required to uphold (e.g. label accounting).
    #[error("audit failure: {0}")]
    Audit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn schema(msg: impl Into<String>) -> Self {
        Error::Schema(msg.into())
    }

    pub fn audit(msg: impl Into<String>) -> Self {
        Error::Audit(msg.into())
    }

    /// True for errors caused by bad input rather than by a failure while
    /// running an otherwise valid experiment.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Schema(_)
                | Error::InvalidArgument(_)
                | Error::DimensionMismatch { .. }
        )
    }
}
