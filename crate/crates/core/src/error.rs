use thiserror::Error;

/// Errors raised by the fusion solvers and their helpers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    /// An argument lies outside the domain the operation is defined on.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The instance is too large to enumerate or to tabulate.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, FusionError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(FusionError::InvalidInput(msg.into()))
}

pub(crate) fn too_large<T>(msg: impl Into<String>) -> Result<T> {
    Err(FusionError::ResourceLimit(msg.into()))
}
