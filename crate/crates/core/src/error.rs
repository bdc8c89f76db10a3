use thiserror::Error;

/// Failure modes shared by every layer of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller combined options that the operation does not support.
    #[error("usage error: {0}")]
    Usage(String),
    /// Two independent evaluation routes disagreed.
    #[error("internal consistency error: {what} (primary {primary:e}, check {check:e})")]
    Consistency {
        what: String,
        primary: f64,
        check: f64,
    },
    /// A numerical procedure failed to reach its advertised accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// The quotient is 0/0 because the input lies on the optimizer manifold.
    #[error("degenerate quotient: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
