use super::record::{compute_speedups, write_records, BenchRecord, Strategy};
use super::BenchError;
use crate::columnwise::solve_columnwise;
use crate::linalg::{load_system, DenseVector, SolveOutcome, SystemInstance};
use crate::onesided::solve_onesided;
use crate::rowwise::{solve_rowwise, ShiftMode};
use crate::runtime::CommStats;
use crate::serial::solve_serial;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// What to sweep and how. Pairs `(n, p)` where `p` does not divide `n` are
/// skipped with a notice rather than failing the run.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub dimensions: Vec<usize>,
    pub process_counts: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub mode: ShiftMode,
    pub tol: f64,
    pub max_iters: usize,
    /// When set, every solve runs exactly this many iterations with the
    /// convergence check disabled — the regime for timing comparisons.
    pub fixed_iters: Option<usize>,
    pub seed: u64,
    pub repetitions: usize,
    pub dominant: bool,
    /// Load this system file instead of generating; its dimension replaces
    /// the `dimensions` sweep.
    pub system_path: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl BenchConfig {
    fn validate(&self) -> Result<(), BenchError> {
        if self.repetitions == 0 {
            return Err(BenchError::Config("repetitions must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(BenchError::Config("at least one strategy is required".into()));
        }
        if self.dimensions.is_empty() && self.system_path.is_none() {
            return Err(BenchError::Config("at least one dimension is required".into()));
        }
        if self.process_counts.is_empty() {
            return Err(BenchError::Config("at least one process count is required".into()));
        }
        if self.fixed_iters == Some(0) || self.max_iters == 0 {
            return Err(BenchError::Config("iteration counts must be at least 1".into()));
        }
        Ok(())
    }

    fn build_instance(&self, n: usize) -> Result<SystemInstance, BenchError> {
        let (a, b, x0) = match &self.system_path {
            Some(path) => {
                let parsed = load_system(path)?;
                let n = parsed.a.n_rows();
                let x0 = parsed.x0.unwrap_or_else(|| DenseVector::zeros(n));
                (parsed.a, parsed.b, x0)
            }
            None => {
                let (a, b) = super::generate_parts(n, self.seed, self.dominant);
                (a, b, DenseVector::zeros(n))
            }
        };
        let sys = match self.fixed_iters {
            Some(iters) => SystemInstance::with_iteration_budget(a, b, x0, iters)?,
            None => SystemInstance::new(a, b, x0, self.tol, self.max_iters)?,
        };
        Ok(sys)
    }
}

/// Runs the configured sweep, writes `results.csv` under the output
/// directory, and returns the records. Wall time covers the solve call only;
/// system construction is excluded. Cells run strictly one after another so
/// they do not disturb each other's timing.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.out_dir)?;

    let dimensions = match &cfg.system_path {
        Some(path) => vec![load_system(path)?.a.n_rows()],
        None => cfg.dimensions.clone(),
    };

    let mut records = Vec::new();
    for &n in &dimensions {
        let sys = cfg.build_instance(n)?;
        for rep in 0..cfg.repetitions {
            for &strategy in &cfg.strategies {
                match strategy {
                    Strategy::Serial => {
                        let started = Instant::now();
                        let outcome = solve_serial(&sys);
                        let wall = started.elapsed().as_secs_f64();
                        records.push(make_record(strategy, None, n, 1, rep, wall, &outcome, &[]));
                    }
                    _ => {
                        for &p in &cfg.process_counts {
                            if n % p != 0 {
                                eprintln!("skipping {strategy} n={n} p={p}: p does not divide n");
                                continue;
                            }
                            let mode = (strategy == Strategy::Row).then_some(cfg.mode);
                            let started = Instant::now();
                            let solve = match strategy {
                                Strategy::Row => solve_rowwise(&sys, p, cfg.mode)?,
                                Strategy::Col => solve_columnwise(&sys, p)?,
                                Strategy::Onesided => solve_onesided(&sys, p)?,
                                Strategy::Serial => unreachable!("handled above"),
                            };
                            let wall = started.elapsed().as_secs_f64();
                            records.push(make_record(
                                strategy,
                                mode,
                                n,
                                p,
                                rep,
                                wall,
                                &solve.outcome,
                                &solve.stats,
                            ));
                        }
                    }
                }
            }
        }
    }

    compute_speedups(&mut records);
    write_records(&cfg.out_dir.join("results.csv"), &records)?;
    Ok(records)
}

#[allow(clippy::too_many_arguments)]
fn make_record(
    strategy: Strategy,
    mode: Option<ShiftMode>,
    n: usize,
    p: usize,
    rep: usize,
    wall_seconds: f64,
    outcome: &SolveOutcome,
    stats: &[CommStats],
) -> BenchRecord {
    let totals = CommStats::merged(stats);
    BenchRecord {
        strategy,
        mode,
        n,
        p,
        rep,
        wall_seconds,
        iterations: outcome.iterations,
        converged: outcome.converged,
        p2p_bytes: totals.point_to_point_bytes,
        collective_bytes: totals.collective_bytes,
        put_bytes: totals.window_put_bytes,
        get_bytes: totals.window_get_bytes,
        speedup: None,
    }
}

/// Writes one series file per parallel `(strategy, n)` pair:
/// `<strategy>_<n>.dat` with rows `p mean min max` of the speedup over the
/// repetitions. Returns the written paths; no parallel records means no
/// files, which is not an error.
pub fn emit_plot_data(records: &[BenchRecord], out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(out_dir)?;
    let mut keys: Vec<(Strategy, usize)> = records
        .iter()
        .filter(|r| r.strategy != Strategy::Serial)
        .map(|r| (r.strategy, r.n))
        .collect();
    keys.sort_by_key(|&(s, n)| (format!("{s}"), n));
    keys.dedup();

    let mut written = Vec::new();
    for (strategy, n) in keys {
        let mut process_counts: Vec<usize> = records
            .iter()
            .filter(|r| r.strategy == strategy && r.n == n)
            .map(|r| r.p)
            .collect();
        process_counts.sort_unstable();
        process_counts.dedup();

        let mut body = String::from("# p mean_speedup min_speedup max_speedup\n");
        for p in process_counts {
            let speedups: Vec<f64> = records
                .iter()
                .filter(|r| r.strategy == strategy && r.n == n && r.p == p)
                .map(|r| r.speedup.ok_or(BenchError::MissingBaseline(n)))
                .collect::<Result<_, _>>()?;
            let mean = speedups.iter().sum::<f64>() / speedups.len() as f64;
            let min = speedups.iter().copied().fold(f64::INFINITY, f64::min);
            let max = speedups.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(body, "{p} {mean} {min} {max}");
        }
        let path = out_dir.join(format!("{strategy}_{n}.dat"));
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

/// Plain-text summary table: mean wall seconds and mean speedup per cell.
pub fn render_summary(records: &[BenchRecord]) -> String {
    let mut keys: Vec<(Strategy, Option<ShiftMode>, usize, usize)> = records
        .iter()
        .map(|r| (r.strategy, r.mode, r.n, r.p))
        .collect();
    keys.sort_by_key(|&(s, m, n, p)| (format!("{s}"), m.map(|m| format!("{m}")), n, p));
    keys.dedup();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<9} {:<12} {:>6} {:>4} {:>6} {:>14} {:>10}",
        "strategy", "mode", "n", "p", "iters", "wall_mean_s", "speedup"
    );
    for (strategy, mode, n, p) in keys {
        let cell: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| r.strategy == strategy && r.mode == mode && r.n == n && r.p == p)
            .collect();
        let wall_mean = cell.iter().map(|r| r.wall_seconds).sum::<f64>() / cell.len() as f64;
        let speedups: Vec<f64> = cell.iter().filter_map(|r| r.speedup).collect();
        let speedup = if speedups.is_empty() {
            "-".to_string()
        } else {
            format!("{:.2}", speedups.iter().sum::<f64>() / speedups.len() as f64)
        };
        let mode = mode.map_or_else(|| "-".to_string(), |m| m.to_string());
        let iters = cell.first().map_or(0, |r| r.iterations);
        let _ = writeln!(
            out,
            "{:<9} {:<12} {:>6} {:>4} {:>6} {:>14.6} {:>10}",
            strategy.to_string(),
            mode,
            n,
            p,
            iters,
            wall_mean,
            speedup
        );
    }
    out
}
