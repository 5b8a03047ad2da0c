use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("parse error in {source_name} at {location}: {message}")]
    Parse {
        source_name: String,
        location: String,
        message: String,
    },

    #[error("exact solver capacity exceeded: n = {n} > max_exact = {max_exact}; configure an external_command or cached_file oracle")]
    Capacity { n: usize, max_exact: usize },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error(
        "oracle inconsistency: 2-OPT mean length {heuristic} is below reported optimum {optimum}"
    )]
    OracleInconsistency { heuristic: f64, optimum: f64 },

    #[error("bootstrap budget exhausted after {evaluations} evaluations (best ratio seen {best_alpha:.6})")]
    BootstrapBudget { evaluations: usize, best_alpha: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dataset must contain both classes")]
    SingleClass,

    #[error("non-finite feature value in row {row}")]
    NonFinite { row: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(
        source: impl Into<String>,
        location: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source.into(),
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the CLI: 1 for validation and configuration
    /// problems, 2 for runtime and oracle failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInstance(_)
            | Error::InvalidTour(_)
            | Error::Parse { .. }
            | Error::Config(_)
            | Error::SingleClass
            | Error::NonFinite { .. }
            | Error::DimensionMismatch { .. }
            | Error::MissingFile(_)
            | Error::Json(_)
            | Error::Csv(_) => 1,
            Error::Capacity { .. }
            | Error::Oracle(_)
            | Error::OracleInconsistency { .. }
            | Error::BootstrapBudget { .. }
            | Error::Io(_) => 2,
        }
    }
}
