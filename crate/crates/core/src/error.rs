use thiserror::Error;

/// Errors surfaced by the numeric kernel and the higher-level routines.
#[derive(Error, Debug, Clone)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision target not met: {0}")]
    Precision(String),
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("extrapolation diverged: {0}")]
    Divergence(String),
    #[error("ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
