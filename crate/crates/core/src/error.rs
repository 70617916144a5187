use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Adaptive integration ran out of refinement budget.
    #[error("integration did not converge: partial value {partial:e}, error estimate {error:e}")]
    IntegrationFailure { partial: f64, error: f64 },

    /// A power series was truncated before meeting its tolerance.
    #[error("series did not converge after {terms} terms: partial sum {partial:e}, remainder bound {bound:e}")]
    SeriesFailure { partial: f64, bound: f64, terms: usize },

    /// Cancellation in an alternating expansion left fewer significant
    /// digits than required.
    #[error("result {partial:e} is not resolved above its rounding floor {floor:e}")]
    PrecisionLoss { partial: f64, floor: f64 },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
