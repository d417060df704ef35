use super::{DenseMatrix, DenseVector, LinalgError};

/// A validated linear system `A x = b` together with the iteration controls:
/// an initial guess, the stopping tolerance on the distance between
/// consecutive iterates, and an iteration limit.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemInstance {
    a: DenseMatrix,
    b: DenseVector,
    x0: DenseVector,
    tol: f64,
    max_iters: usize,
}

impl SystemInstance {
    pub fn new(
        a: DenseMatrix,
        b: DenseVector,
        x0: DenseVector,
        tol: f64,
        max_iters: usize,
    ) -> Result<Self, LinalgError> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(LinalgError::InvalidTolerance(tol));
        }
        Self::build(a, b, x0, tol, max_iters)
    }

    /// Builds a system that runs for exactly `iterations` steps: the
    /// convergence check is disabled (`tol = 0`, and no distance is ever
    /// below zero), which is the standard device for timing runs where the
    /// iteration count must be fixed.
    pub fn with_iteration_budget(
        a: DenseMatrix,
        b: DenseVector,
        x0: DenseVector,
        iterations: usize,
    ) -> Result<Self, LinalgError> {
        Self::build(a, b, x0, 0.0, iterations)
    }

    fn build(
        a: DenseMatrix,
        b: DenseVector,
        x0: DenseVector,
        tol: f64,
        max_iters: usize,
    ) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare { rows: a.n_rows(), cols: a.n_cols() });
        }
        let n = a.n_rows();
        if b.len() != n {
            return Err(LinalgError::LengthMismatch { left: n, right: b.len() });
        }
        if x0.len() != n {
            return Err(LinalgError::LengthMismatch { left: n, right: x0.len() });
        }
        if max_iters == 0 {
            return Err(LinalgError::ZeroIterationLimit);
        }
        for i in 0..n {
            if a[(i, i)] == 0.0 {
                return Err(LinalgError::ZeroDiagonal(i));
            }
        }
        Ok(Self { a, b, x0, tol, max_iters })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseVector {
        &self.b
    }

    pub fn x0(&self) -> &DenseVector {
        &self.x0
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn dimension(&self) -> usize {
        self.a.n_rows()
    }
}

/// Result of a solver run.
///
/// `iterations` counts completed update steps; `distance_history[k]` is the
/// Euclidean distance between the iterates after and before step `k + 1`, so
/// its length equals `iterations`, and `converged` holds exactly when the
/// last recorded distance fell below the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub x: DenseVector,
    pub iterations: usize,
    pub converged: bool,
    pub distance_history: Vec<f64>,
}
