use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration fault at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("stencil needs {needed} neighbours on each side, grid index {index} has {available}")]
    Stencil {
        index: usize,
        needed: usize,
        available: usize,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("malformed input at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
