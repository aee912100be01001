use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericFailure(msg.into())
    }

    /// True for failures caused by the data or the algorithm rather than by
    /// malformed arguments.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NumericFailure(_) | Error::InvalidState(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
