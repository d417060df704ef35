//! Benchmark harness: system generation, the direct-elimination reference
//! solver, strategy sweeps with wall-clock timing and traffic accounting,
//! and CSV/series emission. The `jacobi-bench` binary is a thin front end
//! over this module.

mod direct;
mod generate;
mod record;
mod runner;

pub use direct::{solve_direct, SingularMatrix};
pub use generate::{generate_parts, generate_system};
pub use record::{compute_speedups, read_records, write_records, BenchRecord, Strategy};
pub use runner::{emit_plot_data, render_summary, run_benchmark, BenchConfig};

use crate::linalg::SystemFileError;
use crate::{LinalgError, SolveError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failed: {0}")]
    Solve(#[from] SolveError),
    #[error("invalid system: {0}")]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    SystemFile(#[from] SystemFileError),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("no serial baseline recorded for n = {0}")]
    MissingBaseline(usize),
}
