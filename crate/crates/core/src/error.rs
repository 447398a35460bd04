use thiserror::Error;

pub type Result<T> = std::result::Result<T, BoaError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoaError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A caller broke an operation's precondition (e.g. an unevaluated
    /// individual reached selection, or an estimate was recorded as data).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// Fitness estimation was requested before any actual fitness was recorded.
    #[error("fitness model not ready: {0}")]
    NotReady(String),

    /// An internal invariant failed; this indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl BoaError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BoaError::InvalidArgument(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        BoaError::ContractViolation(msg.into())
    }
}
