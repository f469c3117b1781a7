use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular (rank {rank} of {dim})")]
    Singular { rank: usize, dim: usize },

    #[error("oracle failure: {0}")]
    Oracle(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not rank-1 determining: F vanishes at u = {u:?}, v = {v:?}")]
    Witness { u: Vec<f64>, v: Vec<f64> },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
