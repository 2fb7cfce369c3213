use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates the design constraints (for example `r + s > n`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A real argument lies outside the function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data is malformed (empty sample, non-finite value).
    #[error("invalid input: {0}")]
    Input(String),

    /// The requested computation exceeds the configured work budget.
    #[error("computation budget exceeded: {required} > {budget} ({what})")]
    Budget {
        what: &'static str,
        required: f64,
        budget: f64,
    },

    /// An alternating sum lost too many significant digits to be trusted.
    #[error("cancellation: condition estimate {condition:.3e} exceeds {limit:.1e}")]
    Cancellation { condition: f64, limit: f64 },
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
