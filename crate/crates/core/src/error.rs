use thiserror::Error;

/// Errors produced by the numerical kernels, solvers and inversion routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An argument violates a structural precondition (counts, lengths, ordering).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// No evaluation strategy could certify the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// The data carry no usable information for the requested estimate.
    #[error("degenerate data: {0}")]
    Degenerate(String),
    /// The implicit time step has a vanishing coefficient.
    #[error("singular step: {0}")]
    SingularStep(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
