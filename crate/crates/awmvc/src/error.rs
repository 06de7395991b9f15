//! Error type shared across the crate.

use thiserror::Error;

/// Failure categories. The CLI maps each category to a distinct exit code,
/// so keep new failure modes inside one of these.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed inputs: shape mismatches, bad metadata, out-of-range
    /// configuration, non-finite data.
    #[error("invalid data: {0}")]
    Validation(String),

    /// Numerical breakdown during optimization (non-finite objective,
    /// SVD failure).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
