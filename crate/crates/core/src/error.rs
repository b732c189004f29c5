use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The operation is only defined for some reproduction regimes.
    #[error("regime error: {0}")]
    Regime(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    /// The expected time is infinite (linear process with λ ≥ μ).
    #[error("divergent: {0}")]
    Divergence(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("series did not converge after {terms} terms")]
    NotConverged { terms: usize },
    #[error("rejection budget of {attempts} attempts exhausted")]
    RejectionBudgetExceeded { attempts: u64 },
}

impl Error {
    pub(crate) fn regime(msg: impl Into<String>) -> Self {
        Error::Regime(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn query(msg: impl Into<String>) -> Self {
        Error::InvalidQuery(msg.into())
    }
}
