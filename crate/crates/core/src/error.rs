use thiserror::Error;

use crate::optimize::OptimizeResult;

/// Errors raised while building, parsing or combining matrices.
///
/// Row and column numbers in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("row {row}: expected {expected} entries, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("row {row}, column {col}: negative entry {value}")]
    Negative { row: usize, col: usize, value: f64 },
    #[error("row {row}, column {col}: entry is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("perturbation must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("invalid JSON matrix: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("vector has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("component {index} of the vector is not positive")]
    NonPositiveVector { index: usize },
    #[error("eigen-residual {residual:e} exceeds the allowed {allowed:e}")]
    ResidualTooLarge { residual: f64, allowed: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(
        "dimension {n} exceeds the enumeration limit {limit}; the worst case is ({n}!)^{n} = {worst} matrices"
    )]
    DimensionTooLarge {
        n: usize,
        limit: usize,
        worst: String,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Error)]
pub enum OptimizeError {
    #[error("input is neither strictly positive nor fully indecomposable")]
    PreconditionFailed,
    #[error("loop limit {max_loops} reached before the eigenvector aligned")]
    LoopLimitExceeded {
        max_loops: usize,
        best: Box<OptimizeResult>,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("bound violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
