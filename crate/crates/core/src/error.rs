use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("discretization inconsistency: {0}")]
    Discretization(String),
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than a failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::InvalidParameter(_) | Error::Unsupported(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
