use thiserror::Error;

/// Errors raised by the ensemble, kernel and determinant routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature, node-doubling or truncation loop hit its cap.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// The requested truncation leaves more mass than allowed in the tail.
    #[error("truncation too small: tail bound {tail:e} exceeds {limit:e}")]
    Truncation { tail: f64, limit: f64 },

    /// Exhaustive enumeration was requested beyond the desk-scale cap.
    #[error("too large for exact enumeration: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
