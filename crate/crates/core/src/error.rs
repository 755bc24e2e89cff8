use thiserror::Error;

/// Errors raised anywhere in the decomposition pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("singular linear system")]
    SingularSystem,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("rank mismatch: expected rank {expected}, got rank {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("orthogonal state is a product state; use the product-state encoder")]
    ProductGamma,

    #[error("orthogonal state is entangled; use the entangled-state encoder")]
    EntangledGamma,

    #[error("unsupported rank {0}: only rank-3, rank-4 or separable states are handled")]
    UnsupportedRank(usize),

    #[error("check does not apply to case {0}")]
    WrongCase(String),

    #[error("input is separable; no entanglement witness exists")]
    SeparableInput,

    #[error("solver did not converge within {0} iterations")]
    MaxIter(usize),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("starting point is not usable: {0}")]
    InfeasibleStart(String),

    #[error("could not find a strictly interior starting point")]
    CannotCenter,
}

pub type Result<T> = std::result::Result<T, Error>;
