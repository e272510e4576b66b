use thiserror::Error;

/// Errors raised by mesh construction, assembly, solves and the study drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerically singular block {block}: {reason}")]
    NumericalSingularity { block: usize, reason: String },

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("exact solution failed residual gate: {0}")]
    ResidualGate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
