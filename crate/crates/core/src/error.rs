use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
///
/// Messages name the violated precondition so they can be shown to a CLI
/// user unchanged.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("search space of {size} candidates exceeds the limit of {limit}")]
    SearchSpace { size: f64, limit: f64 },

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
