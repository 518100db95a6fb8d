//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A single data row failed to parse or validate. `row` is the
    /// 1-based line number in the source file.
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    /// A whole-file inconsistency (missing columns, unordered timestamps).
    #[error("{0}")]
    FileFormat(String),

    /// The spectrum cannot be normalized (non-positive total energy).
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    /// The linear system for an unregularized fit has no unique solution.
    #[error("rank-deficient system: {0}")]
    RankDeficient(String),

    /// Network training produced a non-finite loss.
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Divergence { epoch: usize, loss: f64 },

    /// A score is mathematically undefined for the given inputs.
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    pub fn row(row: usize, message: impl Into<String>) -> Self {
        Error::Row {
            row,
            message: message.into(),
        }
    }
}
