//! Benchmark front end: sweeps solver strategies over system sizes and
//! process counts, writes `results.csv` plus per-strategy speedup series
//! files, and prints a summary table.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver error, 4 I/O error.

use clap::Parser;
use jacobi_mp::bench::{emit_plot_data, render_summary, run_benchmark, BenchConfig, BenchError, Strategy};
use jacobi_mp::linalg::SystemFileError;
use jacobi_mp::rowwise::ShiftMode;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "jacobi-bench",
    about = "Benchmark Jacobi solver strategies over an instrumented message-passing runtime"
)]
struct Cli {
    /// System dimension to sweep; repeatable [default: 8 16 32 64 128 256 512]
    #[arg(long = "n", value_name = "N")]
    n: Vec<usize>,

    /// Process count to sweep; repeatable [default: 1 2 4 8]
    #[arg(long = "p", value_name = "P")]
    p: Vec<usize>,

    /// Strategy to run; repeatable [default: all four]
    #[arg(long = "strategy", value_enum, value_name = "STRATEGY")]
    strategy: Vec<Strategy>,

    /// Shift mode for the row-wise strategy
    #[arg(long, value_enum, default_value_t = ShiftMode::Blocking)]
    mode: ShiftMode,

    /// Convergence tolerance (used when --fixed-iters is 0)
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Iteration limit for convergence runs
    #[arg(long = "max-iters", default_value_t = 10_000)]
    max_iters: usize,

    /// Run exactly this many iterations per solve; 0 runs to convergence
    #[arg(long = "fixed-iters", default_value_t = 200)]
    fixed_iters: usize,

    /// Seed for the system generator
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Repetitions per cell
    #[arg(long, default_value_t = 3)]
    reps: usize,

    /// Force strictly diagonally dominant systems (the default)
    #[arg(long, conflicts_with = "raw_uniform")]
    dominant: bool,

    /// Keep the raw uniform [0,1) diagonal: systems generally diverge, which
    /// only matters if you care about the solution rather than the timing
    #[arg(long)]
    raw_uniform: bool,

    /// Load a system file instead of generating (line 1: n; n coefficient
    /// rows; constants line; optional initial-guess line)
    #[arg(long, value_name = "PATH")]
    system: Option<PathBuf>,

    /// Output directory for results.csv and series files
    #[arg(long, value_name = "DIR", default_value = "bench-out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = BenchConfig {
        dimensions: if cli.n.is_empty() { vec![8, 16, 32, 64, 128, 256, 512] } else { cli.n },
        process_counts: if cli.p.is_empty() { vec![1, 2, 4, 8] } else { cli.p },
        strategies: if cli.strategy.is_empty() {
            vec![Strategy::Serial, Strategy::Row, Strategy::Col, Strategy::Onesided]
        } else {
            let mut strategies = cli.strategy;
            strategies.dedup();
            strategies
        },
        mode: cli.mode,
        tol: cli.tol,
        max_iters: cli.max_iters,
        fixed_iters: (cli.fixed_iters != 0).then_some(cli.fixed_iters),
        seed: cli.seed,
        repetitions: cli.reps,
        dominant: !cli.raw_uniform,
        system_path: cli.system,
        out_dir: cli.out,
    };

    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cfg: &BenchConfig) -> Result<(), BenchError> {
    let records = run_benchmark(cfg)?;
    let series = emit_plot_data(&records, &cfg.out_dir)?;
    if series.is_empty() {
        println!("no parallel records; skipping speedup series files");
    } else {
        println!("wrote {} series file(s) under {}", series.len(), cfg.out_dir.display());
    }
    println!("wrote {}", cfg.out_dir.join("results.csv").display());
    print!("{}", render_summary(&records));
    Ok(())
}

fn exit_code(err: &BenchError) -> u8 {
    match err {
        BenchError::Config(_) | BenchError::Linalg(_) => 2,
        BenchError::SystemFile(SystemFileError::Io(_)) => 4,
        BenchError::SystemFile(_) => 2,
        BenchError::Solve(_) | BenchError::MissingBaseline(_) => 3,
        BenchError::Io(_) | BenchError::Csv(_) => 4,
    }
}
