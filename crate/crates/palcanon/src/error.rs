//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by matrix construction, factorizations, the eigensolver,
/// spec handling, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("direct sum of an empty block list")]
    EmptyDirectSum,

    #[error("block {index} in direct sum is not square ({rows}x{cols})")]
    NonSquareBlock {
        index: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    ZeroDimension { rows: usize, cols: usize },

    #[error("entry count {got} does not match {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is exactly singular (zero pivot at step {step})")]
    SingularMatrix { step: usize },

    #[error("matrix is numerically singular (pivot ratio {ratio:.3e})")]
    NearSingular { ratio: f64 },

    #[error("eigenvalue iteration failed to converge after {iterations} steps")]
    NumericalFailure { iterations: usize },

    #[error("block size must be positive")]
    ZeroBlockSize,

    #[error("invalid canonical form spec: {0}")]
    InvalidSpec(String),

    #[error("spec parse error: {0}")]
    SpecParse(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ell={ell} out of range for n={n}")]
    EllOutOfRange { n: usize, ell: usize },

    #[error("eigenvalues cannot be paired: {unpaired} non-unit values left unmatched")]
    PairingFailure { unpaired: usize },

    #[error("computed spectrum does not match the prediction (best error {best_error:.3e})")]
    PredictionMismatch { best_error: f64 },

    #[error("matrix file: {0}")]
    MatrixFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
