use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix or state failed a validity check (hermiticity, trace, positivity).
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A hierarchy predicate needed a noise subset the profile does not contain.
    #[error("profile is missing noise subset {0}")]
    MissingSubset(String),

    /// Reading or writing a file failed; the message names the path.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
