use thiserror::Error;

/// Errors raised by the decomposition library.
///
/// Block indices carried by variants are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("hermitian eigendecomposition failed to converge")]
    EigenFailed,

    #[error("block split {split} out of range for dimension {dim}")]
    SplitOutOfRange { split: usize, dim: usize },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("invalid lift index set: {0}")]
    InvalidIndexSet(String),

    #[error("positivity order k={k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("every diagonal block is numerically zero: the map is zero")]
    ZeroMap,

    #[error(
        "pivot block ({}, {}) of the remainder has norm {residual:e} in peel round {round}: \
         input is not 2-positive",
        block.0,
        block.1
    )]
    NotTwoPositive {
        round: usize,
        block: (usize, usize),
        residual: f64,
    },

    #[error("no CP + coCP split found after {iterations} iterations (gap {gap:e})")]
    Infeasible { gap: f64, iterations: usize },

    #[error("input refuted by a Schmidt-rank witness with quadratic value {value:e}")]
    RefutedInput { value: f64 },

    #[error("decomposition failed verification: {0}")]
    VerificationFailed(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero vector has no Schmidt rank")]
    ZeroVector,

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("witness {index} was refuted at its claimed order {k}")]
    RejectedWitness { index: usize, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
