use std::io;

use thiserror::Error;

/// Everything that can go wrong inside the library.
///
/// The variants are grouped so a front end can map them onto coarse exit
/// statuses with [`Error::category`].
#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a domain invariant (negative age, bad bucket, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// The CSV header does not match the canonical column list.
    #[error("schema error: column `{column}`: {message}")]
    Schema { column: String, message: String },

    /// A data row could not be parsed or failed validation.
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },

    /// Invalid hyperparameters or generator settings.
    #[error("config error: {0}")]
    Config(String),

    /// The caller asked for something the current state cannot do.
    #[error("usage error: {0}")]
    Usage(String),

    /// Training data is unusable for the requested model.
    #[error("training data error: {0}")]
    TrainingData(String),

    /// The optimizer produced a non-finite value.
    #[error("non-finite loss at epoch {epoch}")]
    NonFinite { epoch: usize },

    /// A model file is malformed or from an unsupported format.
    #[error("model file error: {0}")]
    ModelFile(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse error classes used for process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Data,
    Numeric,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Usage(_) | Error::Config(_) => ErrorCategory::Usage,
            Error::NonFinite { .. } => ErrorCategory::Numeric,
            Error::Validation(_)
            | Error::Schema { .. }
            | Error::Row { .. }
            | Error::TrainingData(_)
            | Error::ModelFile(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => ErrorCategory::Data,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
