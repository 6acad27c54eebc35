use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An approximate formula was requested outside the regime where it holds.
    #[error("regime error: {0}")]
    Regime(String),

    /// A sampling grid cannot represent the wavefunction faithfully.
    #[error("resolution error: {reason} (suggested n_points = {suggested_points})")]
    Resolution {
        reason: String,
        suggested_points: usize,
    },

    /// An operation was called on a state it is not defined for.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Two patterns were compared on different abscissae.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
