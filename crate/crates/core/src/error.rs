use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value out of range: {0}")]
    Range(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid modulus: {0}")]
    Modulus(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A construction side condition does not hold for the supplied parameters.
    #[error("condition violated: {0}")]
    ConditionViolation(String),

    #[error("insufficient family: need at least 2 matrices, got {0}")]
    InsufficientFamily(usize),

    #[error("capacity exceeded: {needed} phase entries requested, budget is {budget}; use per-column streaming (papr/coherence work without materializing)")]
    Capacity { needed: usize, budget: usize },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn condition(msg: impl Into<String>) -> Self {
        Error::ConditionViolation(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for the errors a construction raises when its parameters are rejected.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            Error::ConditionViolation(_)
                | Error::Precondition(_)
                | Error::Shape(_)
                | Error::Range(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
