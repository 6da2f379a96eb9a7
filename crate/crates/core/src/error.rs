use thiserror::Error;

/// Errors raised by the simulators and estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} outside the path horizon [0, {horizon}]")]
    OutsideHorizon { t: f64, horizon: f64 },

    #[error("path too short: no renewal epoch after t = {t}")]
    HorizonTooShort { t: f64 },

    #[error("expected work {expected:.3e} exceeds budget {budget:.3e}")]
    BudgetExceeded { expected: f64, budget: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("covariance factorization failed: {0}")]
    Factorization(String),

    #[error("path/regime mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
