use thiserror::Error;

/// Errors raised by the laboratory.
///
/// Each variant carries a stable machine-readable code (see [`Error::code`])
/// that the command-line front-end forwards in its error records.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degenerate channel draw: {0}")]
    Degenerate(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("invalid secrecy scenario: {0}")]
    InvalidScenario(String),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("negative layer rate: {0}")]
    NegativeLayer(String),
    #[error("enumeration limit exceeded: {0}")]
    EnumerationLimit(String),
    #[error("message components are not independent: {0}")]
    NotIndependent(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "CONFIG_ERROR",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::Degenerate(_) => "DEGENERATE_CHANNEL",
            Error::NumericalFailure(_) => "NUMERICAL_FAILURE",
            Error::InvalidScenario(_) => "INVALID_SCENARIO",
            Error::ConstraintViolation(_) => "CONSTRAINT_VIOLATION",
            Error::NegativeLayer(_) => "NEGATIVE_LAYER",
            Error::EnumerationLimit(_) => "ENUMERATION_LIMIT",
            Error::NotIndependent(_) => "NOT_INDEPENDENT",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
