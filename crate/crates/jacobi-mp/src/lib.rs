//! Jacobi linear-system solvers over an instrumented in-process
//! message-passing runtime.
//!
//! Four interchangeable strategies solve the same `A x = b` iteration:
//!
//! - [`serial::solve_serial`] — the single-worker reference.
//! - [`rowwise::solve_rowwise`] — block rows of `A`, cyclic upward shift of
//!   the unknown blocks, blocking or non-blocking (overlapped) transfers.
//! - [`columnwise::solve_columnwise`] — block columns, with both the column
//!   slab and the unknown block shifting every step.
//! - [`onesided::solve_onesided`] — an extra target rank owns two memory
//!   windows holding the old and new iterate; workers move data with one-sided
//!   put/get inside synchronization epochs.
//!
//! Every transfer is metered, so the communication cost of each strategy can
//! be compared exactly; the `jacobi-bench` binary sweeps strategies and
//! system sizes and reports wall times, byte counts, and speedups. See the
//! `examples/` directory for one runnable walkthrough per capability.

pub mod bench;
pub mod columnwise;
pub mod linalg;
pub mod onesided;
pub mod rowwise;
pub mod runtime;
pub mod serial;

pub use linalg::{
    euclidean_distance, is_strictly_diagonally_dominant, iteration_matrix_infinity_norm, split,
    DenseMatrix, DenseVector, LinalgError, Partition, SolveOutcome, Splitting, SystemInstance,
};
pub use runtime::{run_spmd, run_spmd_with, CommStats, RankContext, RuntimeConfig, RuntimeError, SpmdRun};
pub use serial::{jacobi_step, solve_serial, solve_serial_traced};

use thiserror::Error;

/// Failure of a parallel solve: either the request itself was invalid or the
/// runtime reported an error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

/// Result of a parallel solve: the outcome as seen at rank 0, the per-rank
/// traffic counters, and the access log of any windows the strategy used.
#[derive(Debug)]
pub struct ParallelSolve {
    pub outcome: SolveOutcome,
    pub stats: Vec<CommStats>,
    pub window_logs: Vec<runtime::WindowLog>,
}
