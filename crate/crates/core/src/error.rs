use thiserror::Error;

/// Errors raised by clustering and geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported dimension {got}; this operation requires dimension {required}")]
    UnsupportedDimension { required: usize, got: usize },

    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },

    #[error("oracle refused: {n} points exceeds the cap of {cap}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("candidate graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
