use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result is not representable as a finite `f64`.
    #[error("range error: {0}")]
    Range(String),
    /// An iterative method hit its iteration or evaluation budget.
    #[error("no convergence: {0}")]
    Convergence(String),
    /// A series accumulation produced a non-finite value.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// The requested operation is not supported for these inputs.
    #[error("unsupported: {0}")]
    Capability(String),
    /// Malformed or inconsistent input data.
    #[error("invalid data: {0}")]
    Data(String),
    /// Moment matching has no solution for the supplied moments.
    #[error("degenerate fit: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
