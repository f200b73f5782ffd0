use thiserror::Error;

/// Errors raised by the samplers, estimators and bound calculators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("functional is not homogeneous of degree {degree}: probe deviation {deviation:e}")]
    NotHomogeneous { degree: u32, deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
