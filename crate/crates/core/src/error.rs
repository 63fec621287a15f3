use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is not on the hyperboloid: {0}")]
    NotOnHyperboloid(String),

    #[error("vector is not future time-like: {0}")]
    NotTimelike(String),

    #[error("solver did not converge after {iterations} iterations (best value {best:.3e}, gap {gap:.3e})")]
    NonConvergence { iterations: usize, best: f64, gap: f64 },

    #[error("enumeration of {count} partitions exceeds the cap of {cap}")]
    CapExceeded { count: f64, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
