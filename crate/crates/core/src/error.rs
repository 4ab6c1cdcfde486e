use std::path::PathBuf;

use thiserror::Error;

use crate::instance::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("instance failed validation: {0}")]
    Validation(ValidationReport),

    #[error("demand node {node} has too few stations within the travel-time limit after {attempts} placement attempts")]
    RetryExhausted { node: u32, attempts: usize },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("need at least {required} samples, got {actual}")]
    SampleTooSmall { required: usize, actual: usize },

    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("standard deviation must be positive, got {0}")]
    NonPositiveSigma(f64),

    #[error("no reliability estimate for station {0}")]
    MissingEstimate(u32),

    #[error("column `{column}` has non-integral value {value}")]
    NonIntegral { column: String, value: f64 },

    #[error("enumeration exceeded the limit of {limit} assignments")]
    EnumerationLimit { limit: u64 },

    #[error("solution is infeasible for this instance: {0}")]
    InfeasibleSolution(String),

    #[error("evaluation settings differ: {0}")]
    MismatchedSettings(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("MPS line {line}: {message}")]
    Mps { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
