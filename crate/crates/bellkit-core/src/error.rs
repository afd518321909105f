use alloc::string::String;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The inequality is not violated even with perfect detectors, so no
    /// efficiency threshold exists.
    #[error("inequality is not violated at perfect detection efficiency (max eigenvalue {max_eigenvalue})")]
    NoViolation { max_eigenvalue: f64 },
    /// The sampled threshold predicate was not monotone in the efficiency.
    #[error("threshold predicate is not monotone in efficiency: holds at {holds_at}, fails at {fails_at}")]
    NonMonotone { holds_at: f64, fails_at: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
