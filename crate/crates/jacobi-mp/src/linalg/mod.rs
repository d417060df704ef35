//! Dense matrix/vector types, the diagonal splitting, norms, and the
//! block-partition descriptor shared by every solver.

mod dense;
mod partition;
mod splitting;
mod system;
mod system_io;

pub use dense::{euclidean_distance, DenseMatrix, DenseVector};
pub use partition::Partition;
pub use splitting::{is_strictly_diagonally_dominant, iteration_matrix_infinity_norm, split, Splitting};
pub use system::{SolveOutcome, SystemInstance};
pub use system_io::{format_system, load_system, parse_system, ParsedSystem, SystemFileError};

use thiserror::Error;

/// Errors raised by construction and the basic linear-algebra operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("expected {expected} entries, got {got}")]
    EntryCountMismatch { expected: usize, got: usize },
    #[error("non-finite entry at index {0}")]
    NonFiniteEntry(usize),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("zero diagonal entry at row {0}; reorder the equations and retry")]
    ZeroDiagonal(usize),
    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{p} processes do not divide dimension {n} exactly")]
    IndivisibleDimension { n: usize, p: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("iteration limit must be at least 1")]
    ZeroIterationLimit,
}

/// Euclidean distance over raw slices, summing squared differences in
/// ascending index order. Shared by the public operation and the solvers so
/// every strategy evaluates the stopping rule with the same rounding.
pub(crate) fn distance_slices(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut sum = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        let d = a - b;
        sum += d * d;
    }
    sum.sqrt()
}
