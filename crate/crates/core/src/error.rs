use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("component {axis} of {sub:?} exceeds {sup:?}")]
    ComponentExceeds {
        axis: usize,
        sub: Vec<u32>,
        sup: Vec<u32>,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("a decaying test function is required (decay rate must be > 0)")]
    DecayRequired,
    #[error("extrapolation diverged: {0}")]
    ExtrapolationDiverged(String),
    #[error("support violation: pairing is {value:e} on a function supported away from the origin")]
    SupportViolation { value: f64 },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
