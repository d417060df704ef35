//! Single-worker Jacobi iteration, the reference every parallel strategy is
//! validated against.

use crate::linalg::{distance_slices, DenseVector, SolveOutcome, Splitting, SystemInstance};

/// One Jacobi update: `x[i] = (b[i] + sum_{j != i} (-a[i][j] * x_prev[j])) / a[i][i]`.
///
/// The off-diagonal terms come from the splitting's (negated) `L` and `U`
/// rows and are accumulated in ascending `j`; that order is the contract the
/// parallel strategies are compared against.
pub fn jacobi_step(splitting: &Splitting, b: &DenseVector, x_prev: &DenseVector) -> DenseVector {
    let n = splitting.dimension();
    assert_eq!(b.len(), n, "constant vector length mismatch");
    assert_eq!(x_prev.len(), n, "iterate length mismatch");
    let x = x_prev.as_slice();
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let lower = splitting.strictly_lower().row(i);
        let upper = splitting.strictly_upper().row(i);
        let mut acc = 0.0;
        for j in 0..i {
            acc += lower[j] * x[j];
        }
        for j in i + 1..n {
            acc += upper[j] * x[j];
        }
        next.push((b[i] + acc) / splitting.diagonal()[i]);
    }
    DenseVector::from_computed(next)
}

/// Runs Jacobi from the instance's initial guess, recording the distance
/// between consecutive iterates after every step and stopping as soon as it
/// drops below the tolerance or the iteration limit is reached.
pub fn solve_serial(sys: &SystemInstance) -> SolveOutcome {
    solve_serial_core(sys, None)
}

/// Like [`solve_serial`] but also returns every iterate, for equivalence
/// checks against the parallel strategies.
pub fn solve_serial_traced(sys: &SystemInstance) -> (SolveOutcome, Vec<Vec<f64>>) {
    let mut trace = Vec::new();
    let outcome = solve_serial_core(sys, Some(&mut trace));
    (outcome, trace)
}

fn solve_serial_core(sys: &SystemInstance, mut trace: Option<&mut Vec<Vec<f64>>>) -> SolveOutcome {
    let splitting = crate::linalg::split(sys.a()).expect("diagonal validated at construction");
    let mut x = sys.x0().clone();
    let mut distance_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < sys.max_iters() {
        let next = jacobi_step(&splitting, sys.b(), &x);
        let d = distance_slices(next.as_slice(), x.as_slice());
        distance_history.push(d);
        iterations += 1;
        x = next;
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(x.as_slice().to_vec());
        }
        if d < sys.tol() {
            converged = true;
            break;
        }
    }
    SolveOutcome { x, iterations, converged, distance_history }
}
