//! Row-wise parallel Jacobi.
//!
//! Each rank owns a block of `m = n / p` matrix rows plus the matching
//! blocks of `b` and `x`. Every iteration runs `p` steps: the rank
//! accumulates the products of its rows against the unknown block it
//! currently holds, then passes that block to the rank above while receiving
//! the next one from below, so each block visits every rank exactly once.
//! Rank 0 gathers the old and new blocks, evaluates the stopping distance,
//! and broadcasts it.
//!
//! In non-blocking mode the shift is issued before the local accumulation so
//! transfer and compute overlap; the iterates are bitwise identical to
//! blocking mode, only the timing differs.

use crate::linalg::{distance_slices, DenseVector, Partition, SolveOutcome, SystemInstance};
use crate::runtime::{run_spmd, RankContext, RuntimeError, TAG_SHIFT};
use crate::{ParallelSolve, SolveError};
use serde::{Deserialize, Serialize};

/// Whether the shift uses blocking send/recv or non-blocking transfers
/// overlapped with the accumulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ShiftMode {
    Blocking,
    Nonblocking,
}

impl std::fmt::Display for ShiftMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShiftMode::Blocking => write!(f, "blocking"),
            ShiftMode::Nonblocking => write!(f, "nonblocking"),
        }
    }
}

/// One rank's stripe of the system: `m` full rows of `A`, the owned blocks
/// of `b` and `x`, and the per-iteration accumulator.
pub struct RowBlock {
    owner: usize,
    part: Partition,
    rows: Vec<f64>,
    b_part: Vec<f64>,
    x_part: Vec<f64>,
    accumulator: Vec<f64>,
}

impl RowBlock {
    pub fn from_system(sys: &SystemInstance, part: Partition, owner: usize) -> Self {
        let n = part.n();
        let range = part.row_range(owner);
        let mut rows = Vec::with_capacity(part.m() * n);
        for i in range.clone() {
            rows.extend_from_slice(sys.a().row(i));
        }
        Self {
            owner,
            part,
            rows,
            b_part: sys.b().as_slice()[range.clone()].to_vec(),
            x_part: sys.x0().as_slice()[range].to_vec(),
            accumulator: vec![0.0; part.m()],
        }
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn x_part(&self) -> &[f64] {
        &self.x_part
    }

    pub fn accumulator(&self) -> &[f64] {
        &self.accumulator
    }

    pub fn reset_accumulator(&mut self) {
        self.accumulator.fill(0.0);
    }

    /// Finishes an iteration once all blocks have been accumulated:
    /// `x[i] = (b[i] - acc[i]) / a[i][i]` over the owned rows.
    pub fn finalize(&self) -> Vec<f64> {
        let n = self.part.n();
        let base = self.owner * self.part.m();
        self.accumulator
            .iter()
            .enumerate()
            .map(|(li, acc)| {
                let diag = self.rows[li * n + base + li];
                (self.b_part[li] - acc) / diag
            })
            .collect()
    }
}

/// Adds this block's share of the row products: for each owned row `i`,
/// `acc[i] += sum_{j in block, j != i} a[i][j] * x_block[j - offset]`, in
/// ascending `j`. The diagonal term is skipped so the accumulated total is
/// exactly the off-diagonal row product the update equation needs.
pub fn partial_accumulate(block: &mut RowBlock, x_block: &[f64], block_id: usize) {
    let m = block.part.m();
    let n = block.part.n();
    assert_eq!(x_block.len(), m, "unknown block length mismatch");
    let offset = block_id * m;
    for li in 0..m {
        let global_i = block.owner * m + li;
        let cols = &block.rows[li * n + offset..li * n + offset + m];
        let mut acc = block.accumulator[li];
        if (offset..offset + m).contains(&global_i) {
            let d = global_i - offset;
            for jj in 0..d {
                acc += cols[jj] * x_block[jj];
            }
            for jj in d + 1..m {
                acc += cols[jj] * x_block[jj];
            }
        } else {
            for jj in 0..m {
                acc += cols[jj] * x_block[jj];
            }
        }
        block.accumulator[li] = acc;
    }
}

/// Runs the row-wise strategy over `p` ranks.
pub fn solve_rowwise(sys: &SystemInstance, p: usize, mode: ShiftMode) -> Result<ParallelSolve, SolveError> {
    solve_rowwise_core(sys, p, mode, false).map(|(solve, _)| solve)
}

/// [`solve_rowwise`] that also returns the full iterate after every
/// iteration, as gathered at rank 0.
pub fn solve_rowwise_traced(
    sys: &SystemInstance,
    p: usize,
    mode: ShiftMode,
) -> Result<(ParallelSolve, Vec<Vec<f64>>), SolveError> {
    solve_rowwise_core(sys, p, mode, true).map(|(solve, trace)| (solve, trace.unwrap_or_default()))
}

type RankReturn = Option<(SolveOutcome, Option<Vec<Vec<f64>>>)>;

fn solve_rowwise_core(
    sys: &SystemInstance,
    p: usize,
    mode: ShiftMode,
    record_trace: bool,
) -> Result<(ParallelSolve, Option<Vec<Vec<f64>>>), SolveError> {
    let part = Partition::new(sys.dimension(), p)?;
    let run = run_spmd(p, |ctx| rank_body(ctx, sys, part, mode, record_trace))?;
    let mut results = run.results;
    let (outcome, trace) = results[0].take().expect("rank 0 returns the outcome");
    Ok((ParallelSolve { outcome, stats: run.stats, window_logs: run.window_logs }, trace))
}

fn rank_body(
    ctx: &mut RankContext<'_>,
    sys: &SystemInstance,
    part: Partition,
    mode: ShiftMode,
    record_trace: bool,
) -> Result<RankReturn, RuntimeError> {
    let rank = ctx.rank();
    let p = part.p();
    let up = (rank + p - 1) % p;
    let down = (rank + 1) % p;
    let mut block = RowBlock::from_system(sys, part, rank);

    let mut history = Vec::new();
    let mut trace: Vec<Vec<f64>> = Vec::new();
    let mut final_full: Option<Vec<f64>> = None;
    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        block.reset_accumulator();
        let mut current = block.x_part.clone();
        #[cfg(debug_assertions)]
        let mut visited = vec![false; p];
        for s in 0..p {
            let block_id = (rank + s) % p;
            #[cfg(debug_assertions)]
            {
                assert!(!visited[block_id], "block {block_id} visited twice at rank {rank}");
                visited[block_id] = true;
            }
            match mode {
                ShiftMode::Blocking => {
                    partial_accumulate(&mut block, &current, block_id);
                    if s < p - 1 {
                        ctx.send(up, TAG_SHIFT, &current)?;
                        current = ctx.recv(down, TAG_SHIFT)?;
                    }
                }
                ShiftMode::Nonblocking => {
                    if s < p - 1 {
                        let mut send = ctx.isend(up, TAG_SHIFT, &current)?;
                        let mut recv = ctx.irecv(down, TAG_SHIFT)?;
                        partial_accumulate(&mut block, &current, block_id);
                        let next = ctx.wait(&mut recv)?.expect("receive transfer yields a payload");
                        ctx.wait(&mut send)?;
                        current = next;
                    } else {
                        partial_accumulate(&mut block, &current, block_id);
                    }
                }
            }
        }
        #[cfg(debug_assertions)]
        debug_assert!(visited.iter().all(|&v| v), "rank {rank} missed a block");

        let x_new = block.finalize();

        // Stopping check at rank 0 over the gathered full vectors.
        let gathered_new = ctx.gather(0, &x_new)?;
        let gathered_old = ctx.gather(0, &block.x_part)?;
        let mut d = 0.0;
        if rank == 0 {
            let new_full = gathered_new.expect("root gather");
            let old_full = gathered_old.expect("root gather");
            d = distance_slices(&new_full, &old_full);
            final_full = Some(new_full);
        }
        let d = ctx.broadcast(0, &[d])?[0];
        iterations += 1;
        if rank == 0 {
            history.push(d);
            if record_trace {
                trace.push(final_full.clone().expect("gathered at root"));
            }
        }
        block.x_part = x_new;
        if d < sys.tol() {
            converged = true;
            break;
        }
        if iterations == sys.max_iters() {
            break;
        }
    }

    if rank == 0 {
        let outcome = SolveOutcome {
            x: DenseVector::from_computed(final_full.expect("at least one iteration runs")),
            iterations,
            converged,
            distance_history: history,
        };
        Ok(Some((outcome, record_trace.then_some(trace))))
    } else {
        Ok(None)
    }
}
