//! One-sided parallel Jacobi.
//!
//! The job runs `p` worker ranks plus one extra target rank that owns two
//! memory windows holding the previous and the next iterate. Each iteration,
//! every worker gets the whole previous vector from the old window, computes
//! its owned block with full row dot products (no shifting needed), and puts
//! the block into the new window; the target then measures the distance
//! between the two windows, copies new over old locally (no communication),
//! and broadcasts the distance so every rank applies the same stopping rule.
//!
//! All transfers go through post/wait (target side) and start/complete
//! (origin side) epochs, so data is visible exactly at epoch boundaries.

use crate::linalg::{distance_slices, DenseVector, Partition, SolveOutcome, SystemInstance};
use crate::runtime::{
    run_spmd, ProcessGroup, RankContext, RuntimeError, WindowHandle, TAG_CONTROL,
};
use crate::{ParallelSolve, SolveError};

/// The two windows of the scheme, both owned by the target rank and both of
/// full vector length; worker `r` writes only its slot `[r*m, (r+1)*m)`.
pub struct WindowLayout {
    pub handle_old: WindowHandle,
    pub handle_new: WindowHandle,
}

impl WindowLayout {
    /// Collectively creates both windows; storage lives at `target` only.
    pub fn create(ctx: &mut RankContext<'_>, target: usize, n: usize) -> Result<Self, RuntimeError> {
        Ok(Self {
            handle_old: ctx.window_create(target, n)?,
            handle_new: ctx.window_create(target, n)?,
        })
    }
}

/// The two synchronization groups: the workers issuing one-sided operations
/// and the single target owning the windows. Disjoint by construction and
/// together they cover the whole world.
pub struct GroupPair {
    pub origin_group: ProcessGroup,
    pub target_group: ProcessGroup,
}

impl GroupPair {
    pub fn new(workers: usize, target: usize) -> Result<Self, RuntimeError> {
        Ok(Self {
            origin_group: ProcessGroup::new((0..workers).collect())?,
            target_group: ProcessGroup::new(vec![target])?,
        })
    }
}

/// Target-side step between epochs: distance between the two windows, then
/// old is overwritten with new locally, moving zero bytes through the
/// runtime.
pub fn target_distance_and_swap(
    ctx: &RankContext<'_>,
    handle_old: &WindowHandle,
    handle_new: &WindowHandle,
) -> Result<f64, RuntimeError> {
    let new_contents = ctx.window_owner_read(handle_new)?;
    let old_contents = ctx.window_owner_read(handle_old)?;
    let d = distance_slices(&new_contents, &old_contents);
    ctx.window_owner_write(handle_old, 0, &new_contents)?;
    Ok(d)
}

/// Runs the one-sided strategy with `p` workers (the job spawns `p + 1`
/// ranks; the extra, highest rank is the target). The returned stats vector
/// therefore has `p + 1` entries.
pub fn solve_onesided(sys: &SystemInstance, p: usize) -> Result<ParallelSolve, SolveError> {
    solve_onesided_core(sys, p, false).map(|(solve, _)| solve)
}

/// [`solve_onesided`] that also returns the full iterate after every
/// iteration, as recorded by the target from the new window.
pub fn solve_onesided_traced(
    sys: &SystemInstance,
    p: usize,
) -> Result<(ParallelSolve, Vec<Vec<f64>>), SolveError> {
    solve_onesided_core(sys, p, true).map(|(solve, trace)| (solve, trace.unwrap_or_default()))
}

struct RankReturn {
    outcome: Option<SolveOutcome>,
    trace: Option<Vec<Vec<f64>>>,
}

fn solve_onesided_core(
    sys: &SystemInstance,
    p: usize,
    record_trace: bool,
) -> Result<(ParallelSolve, Option<Vec<Vec<f64>>>), SolveError> {
    let part = Partition::new(sys.dimension(), p)?;
    let run = run_spmd(p + 1, |ctx| rank_body(ctx, sys, part, record_trace))?;
    let mut results = run.results;
    let trace = results[p].trace.take();
    let outcome = results[0].outcome.take().expect("rank 0 returns the outcome");
    Ok((ParallelSolve { outcome, stats: run.stats, window_logs: run.window_logs }, trace))
}

fn rank_body(
    ctx: &mut RankContext<'_>,
    sys: &SystemInstance,
    part: Partition,
    record_trace: bool,
) -> Result<RankReturn, RuntimeError> {
    let rank = ctx.rank();
    let p = part.p();
    let n = part.n();
    let m = part.m();
    let target = p;
    let groups = GroupPair::new(p, target)?;

    // Rank 0 holds the system and hands each worker its row block and the
    // matching slices of b and the initial guess; the target needs none of
    // them.
    let slice_rows = |owner: usize| -> Vec<f64> {
        let mut rows = Vec::with_capacity(m * n);
        for i in part.row_range(owner) {
            rows.extend_from_slice(sys.a().row(i));
        }
        rows
    };
    let (rows, b_part, x0_part) = if rank == 0 {
        for worker in 1..p {
            ctx.send(worker, TAG_CONTROL, &slice_rows(worker))?;
            ctx.send(worker, TAG_CONTROL, &sys.b().as_slice()[part.vector_range(worker)])?;
            ctx.send(worker, TAG_CONTROL, &sys.x0().as_slice()[part.vector_range(worker)])?;
        }
        (
            slice_rows(0),
            sys.b().as_slice()[part.vector_range(0)].to_vec(),
            sys.x0().as_slice()[part.vector_range(0)].to_vec(),
        )
    } else if rank < p {
        (
            ctx.recv(0, TAG_CONTROL)?,
            ctx.recv(0, TAG_CONTROL)?,
            ctx.recv(0, TAG_CONTROL)?,
        )
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };

    let mut layout = WindowLayout::create(ctx, target, n)?;

    // Seed the old window with the initial guess.
    if rank == target {
        ctx.window_post(&layout.handle_old, &groups.origin_group)?;
        ctx.window_wait(&layout.handle_old)?;
    } else {
        ctx.window_start(&mut layout.handle_old, &groups.target_group)?;
        ctx.window_put(&mut layout.handle_old, rank * m, &x0_part)?;
        ctx.window_complete(&mut layout.handle_old)?;
    }

    let mut history = Vec::new();
    let mut trace: Vec<Vec<f64>> = Vec::new();
    let mut iterations = 0usize;
    let mut converged = false;
    let mut final_x: Option<Vec<f64>> = None;

    loop {
        let mut d = 0.0;
        if rank == target {
            ctx.window_post(&layout.handle_old, &groups.origin_group)?;
            ctx.window_post(&layout.handle_new, &groups.origin_group)?;
            ctx.window_wait(&layout.handle_old)?;
            ctx.window_wait(&layout.handle_new)?;
            if record_trace {
                trace.push(ctx.window_owner_read(&layout.handle_new)?);
            }
            d = target_distance_and_swap(ctx, &layout.handle_old, &layout.handle_new)?;
        } else {
            ctx.window_start(&mut layout.handle_old, &groups.target_group)?;
            let x_full = ctx.window_get(&layout.handle_old, 0, n)?;
            ctx.window_complete(&mut layout.handle_old)?;

            let mut x_new = Vec::with_capacity(m);
            for li in 0..m {
                let gi = rank * m + li;
                let row = &rows[li * n..(li + 1) * n];
                let mut acc = 0.0;
                for j in 0..gi {
                    acc += row[j] * x_full[j];
                }
                for j in gi + 1..n {
                    acc += row[j] * x_full[j];
                }
                x_new.push((b_part[li] - acc) / row[gi]);
            }

            ctx.window_start(&mut layout.handle_new, &groups.target_group)?;
            ctx.window_put(&mut layout.handle_new, rank * m, &x_new)?;
            ctx.window_complete(&mut layout.handle_new)?;
        }

        let d = ctx.broadcast(target, &[d])?[0];
        iterations += 1;
        if rank == 0 {
            history.push(d);
        }
        let stop = d < sys.tol() || iterations == sys.max_iters();
        if d < sys.tol() {
            converged = true;
        }
        if stop {
            // The target holds the final iterate (the swap copied it into
            // the old window as well); rank 0 assembles the outcome from it.
            if rank == target {
                let final_contents = ctx.window_owner_read(&layout.handle_new)?;
                ctx.send(0, TAG_CONTROL, &final_contents)?;
            }
            if rank == 0 {
                final_x = Some(ctx.recv(target, TAG_CONTROL)?);
            }
            break;
        }
    }

    Ok(RankReturn {
        outcome: (rank == 0).then(|| SolveOutcome {
            x: DenseVector::from_computed(final_x.expect("target sent the final vector")),
            iterations,
            converged,
            distance_history: std::mem::take(&mut history),
        }),
        trace: (rank == target && record_trace).then_some(trace),
    })
}
