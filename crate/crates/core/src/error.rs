use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("horizon {horizon} is below the minimum of {min}")]
    HorizonTooSmall { horizon: usize, min: usize },

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("summability condition {condition} violated: {detail}")]
    AxiomViolation {
        condition: &'static str,
        detail: String,
    },

    #[error("{0} does not support this operation")]
    UnsupportedMode(String),

    #[error("invalid convergence mode: {0}")]
    InvalidMode(String),

    #[error("denominator vanishes at index {0}")]
    ZeroDenominator(String),

    #[error("mismatched nets: {0}")]
    Mismatch(String),

    #[error("function sample and modular live on different grids")]
    GridMismatch,

    #[error("delta {delta} is below the grid spacing {h_min}")]
    DeltaBelowSpacing { delta: f64, h_min: f64 },

    #[error("operator requires region {expected}")]
    WrongRegion { expected: String },

    #[error("index {index} outside the operator range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("test system not verified: {0}")]
    UnverifiedSystem(String),

    #[error("denominator vanishes: {0}")]
    VanishingDenominator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
