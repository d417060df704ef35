//! Column-wise parallel Jacobi.
//!
//! Each rank starts with a block of `m = n / p` matrix columns (an `n x m`
//! slab) and the matching block of the unknown vector. Every iteration runs
//! `p` steps; between steps both the slab and the unknown block shift to the
//! rank above, so after `p` steps each rank has multiplied its owned rows
//! against every column block exactly once. The zero-padded full-length
//! accumulators are then summed across ranks with an allreduce, every rank
//! finalizes its owned block, and rank 0 evaluates the stopping distance.
//!
//! Shipping whole slabs every step is what makes this distribution expensive:
//! the shift moves `(n*m + m)` elements per rank per step where the row-wise
//! scheme moves `m`, a factor of exactly `n + 1`. The slab is physically
//! copied on every hop so the byte accounting reflects the real traffic.

use crate::linalg::{distance_slices, DenseVector, Partition, SolveOutcome, SystemInstance};
use crate::runtime::{run_spmd, RankContext, RuntimeError, TAG_SHIFT};
use crate::{ParallelSolve, SolveError};
use std::ops::Range;

/// One rank's travelling state: the column slab it currently holds, the
/// matching unknown block, and the full-length accumulator (only the owned
/// rows are ever written; the rest stays zero for the cross-rank sum).
pub struct ColumnBlock {
    owner: usize,
    part: Partition,
    start_col: usize,
    slab: Vec<f64>,
    x_part: Vec<f64>,
    accumulator: Vec<f64>,
}

impl ColumnBlock {
    pub fn from_system(sys: &SystemInstance, part: Partition, owner: usize) -> Self {
        let n = part.n();
        let m = part.m();
        let cols = part.column_range(owner);
        let mut slab = Vec::with_capacity(n * m);
        for i in 0..n {
            slab.extend_from_slice(&sys.a().row(i)[cols.clone()]);
        }
        Self {
            owner,
            part,
            start_col: cols.start,
            slab,
            x_part: sys.x0().as_slice()[part.vector_range(owner)].to_vec(),
            accumulator: vec![0.0; n],
        }
    }

    pub fn owner(&self) -> usize {
        self.owner
    }

    pub fn start_col(&self) -> usize {
        self.start_col
    }

    pub fn accumulator(&self) -> &[f64] {
        &self.accumulator
    }

    pub fn reset_accumulator(&mut self) {
        self.accumulator.fill(0.0);
    }
}

/// Columns held by `rank` at shift step `step`:
/// `[((rank + step) * m) mod n, ((rank + step) * m) mod n + m)`.
pub fn column_block_indices(rank: usize, step: usize, part: Partition) -> Range<usize> {
    assert!(rank < part.p() && step < part.p(), "rank/step out of range");
    let start = ((rank + step) * part.m()) % part.n();
    start..start + part.m()
}

/// Accumulates the currently held slab against the currently held unknown
/// block: for each owned row `i`,
/// `acc[i] += sum_{j in held columns, j != i} a[i][j] * x_part[j - start]`,
/// ascending `j`. Restricting the writes to the owned rows keeps the p
/// accumulators a disjoint partition of the products, so their cross-rank
/// sum is the full off-diagonal product exactly once.
pub fn partial_product(block: &mut ColumnBlock) {
    let m = block.part.m();
    let start = block.start_col;
    for global_i in block.part.row_range(block.owner) {
        let cols = &block.slab[global_i * m..(global_i + 1) * m];
        let mut acc = block.accumulator[global_i];
        if (start..start + m).contains(&global_i) {
            let d = global_i - start;
            for jj in 0..d {
                acc += cols[jj] * block.x_part[jj];
            }
            for jj in d + 1..m {
                acc += cols[jj] * block.x_part[jj];
            }
        } else {
            for jj in 0..m {
                acc += cols[jj] * block.x_part[jj];
            }
        }
        block.accumulator[global_i] = acc;
    }
}

/// Runs the column-wise strategy (cyclic slab shift plus allreduce) over
/// `p` ranks.
pub fn solve_columnwise(sys: &SystemInstance, p: usize) -> Result<ParallelSolve, SolveError> {
    solve_columnwise_core(sys, p, Route::Shift, false).map(|(solve, _)| solve)
}

/// [`solve_columnwise`] that also returns the full iterate after every
/// iteration, as finalized at rank 0.
pub fn solve_columnwise_traced(
    sys: &SystemInstance,
    p: usize,
) -> Result<(ParallelSolve, Vec<Vec<f64>>), SolveError> {
    solve_columnwise_core(sys, p, Route::Shift, true).map(|(solve, trace)| (solve, trace.unwrap_or_default()))
}

/// Reference formulation: no shifting at all — each rank multiplies only its
/// own columns (contributing to every row) and one allreduce combines the
/// partials. Used to cross-check the shift schedule.
pub fn solve_columnwise_allreduce(sys: &SystemInstance, p: usize) -> Result<ParallelSolve, SolveError> {
    solve_columnwise_core(sys, p, Route::AllreduceOnly, false).map(|(solve, _)| solve)
}

#[derive(Clone, Copy, PartialEq)]
enum Route {
    Shift,
    AllreduceOnly,
}

type RankReturn = Option<(SolveOutcome, Option<Vec<Vec<f64>>>)>;

fn solve_columnwise_core(
    sys: &SystemInstance,
    p: usize,
    route: Route,
    record_trace: bool,
) -> Result<(ParallelSolve, Option<Vec<Vec<f64>>>), SolveError> {
    let part = Partition::new(sys.dimension(), p)?;
    let run = run_spmd(p, |ctx| rank_body(ctx, sys, part, route, record_trace))?;
    let mut results = run.results;
    let (outcome, trace) = results[0].take().expect("rank 0 returns the outcome");
    Ok((ParallelSolve { outcome, stats: run.stats, window_logs: run.window_logs }, trace))
}

fn rank_body(
    ctx: &mut RankContext<'_>,
    sys: &SystemInstance,
    part: Partition,
    route: Route,
    record_trace: bool,
) -> Result<RankReturn, RuntimeError> {
    let rank = ctx.rank();
    let p = part.p();
    let n = part.n();
    let m = part.m();
    let up = (rank + p - 1) % p;
    let down = (rank + 1) % p;

    let mut block = ColumnBlock::from_system(sys, part, rank);
    let home_slab = block.slab.clone();
    let home_start = block.start_col;
    let mut x_part = block.x_part.clone();

    let a = sys.a();
    let b = sys.b();
    let own_rows = part.row_range(rank);
    let mut x_prev_full: Option<Vec<f64>> = (rank == 0).then(|| sys.x0().as_slice().to_vec());

    let mut history = Vec::new();
    let mut trace: Vec<Vec<f64>> = Vec::new();
    let mut final_full: Option<Vec<f64>> = None;
    let mut iterations = 0usize;
    let mut converged = false;

    loop {
        block.reset_accumulator();
        block.slab.clone_from(&home_slab);
        block.start_col = home_start;
        block.x_part.clone_from(&x_part);

        match route {
            Route::Shift => {
                for s in 0..p {
                    debug_assert_eq!(
                        block.start_col,
                        column_block_indices(rank, s, part).start,
                        "slab out of schedule at rank {rank}, step {s}"
                    );
                    partial_product(&mut block);
                    if s < p - 1 {
                        ctx.send(up, TAG_SHIFT, &block.slab)?;
                        ctx.send(up, TAG_SHIFT, &block.x_part)?;
                        block.slab = ctx.recv(down, TAG_SHIFT)?;
                        block.x_part = ctx.recv(down, TAG_SHIFT)?;
                        block.start_col = column_block_indices(rank, s + 1, part).start;
                    }
                }
            }
            Route::AllreduceOnly => {
                // Own columns only, contributing to every row.
                for i in 0..n {
                    let cols = &block.slab[i * m..(i + 1) * m];
                    let mut acc = block.accumulator[i];
                    if (home_start..home_start + m).contains(&i) {
                        let d = i - home_start;
                        for jj in 0..d {
                            acc += cols[jj] * block.x_part[jj];
                        }
                        for jj in d + 1..m {
                            acc += cols[jj] * block.x_part[jj];
                        }
                    } else {
                        for jj in 0..m {
                            acc += cols[jj] * block.x_part[jj];
                        }
                    }
                    block.accumulator[i] = acc;
                }
            }
        }

        let total = ctx.allreduce_sum(&block.accumulator)?;
        let x_new: Vec<f64> = own_rows
            .clone()
            .map(|i| (b[i] - total[i]) / a[(i, i)])
            .collect();

        let mut d = 0.0;
        if rank == 0 {
            let x_new_full: Vec<f64> = (0..n).map(|i| (b[i] - total[i]) / a[(i, i)]).collect();
            d = distance_slices(&x_new_full, x_prev_full.as_ref().expect("rank 0 keeps the previous full vector"));
            x_prev_full = Some(x_new_full.clone());
            final_full = Some(x_new_full);
        }
        let d = ctx.broadcast(0, &[d])?[0];
        iterations += 1;
        if rank == 0 {
            history.push(d);
            if record_trace {
                trace.push(final_full.clone().expect("finalized at root"));
            }
        }
        x_part = x_new;
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::serial::solve_serial;

    fn sys_2x2() -> SystemInstance {
        SystemInstance::new(
            DenseMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap(),
            DenseVector::new(vec![3.0, 4.0]).unwrap(),
            DenseVector::zeros(2),
            1e-10,
            500,
        )
        .unwrap()
    }

    #[test]
    fn block_indices_follow_the_modulo_schedule() {
        let part = Partition::new(8, 4).unwrap();
        assert_eq!(column_block_indices(1, 1, part), 4..6);
        assert_eq!(column_block_indices(0, 0, part), 0..2);
        assert_eq!(column_block_indices(3, 2, part), 2..4);
    }

    #[test]
    fn diagonal_slab_contributes_nothing() {
        let sys = SystemInstance::new(
            DenseMatrix::from_fn(4, 4, |i, j| if i == j { 3.0 } else { 0.0 }),
            DenseVector::new(vec![1.0; 4]).unwrap(),
            DenseVector::new(vec![1.0; 4]).unwrap(),
            1e-10,
            10,
        )
        .unwrap();
        let part = Partition::new(4, 2).unwrap();
        let mut block = ColumnBlock::from_system(&sys, part, 0);
        partial_product(&mut block);
        assert_eq!(block.accumulator(), &[0.0; 4]);
    }

    #[test]
    fn single_off_diagonal_entry_lands_in_the_right_cell() {
        // Rank 0 holding column 1 (step 1) contributes a[0][1] * x[1] to
        // accumulator[0] only.
        let sys = sys_2x2();
        let part = Partition::new(2, 2).unwrap();
        let mut block = ColumnBlock::from_system(&sys, part, 0);
        block.start_col = 1;
        block.slab = vec![sys.a()[(0, 1)], sys.a()[(1, 1)]];
        block.x_part = vec![5.0];
        partial_product(&mut block);
        assert_eq!(block.accumulator(), &[1.0 * 5.0, 0.0]);
    }

    #[test]
    fn rank_accumulators_partition_the_full_product() {
        // 4x4 across p = 2: the two ranks' accumulators, summed over all
        // steps, must equal the dense off-diagonal product exactly once.
        let entries: Vec<f64> = (0..16).map(|k| (k as f64) * 0.5 - 2.0 + if k % 5 == 0 { 9.0 } else { 0.0 }).collect();
        let a = DenseMatrix::new(4, 4, entries).unwrap();
        let x = [0.5, -1.0, 2.0, 0.25];
        let sys = SystemInstance::new(
            a.clone(),
            DenseVector::zeros(4),
            DenseVector::new(x.to_vec()).unwrap(),
            1e-10,
            10,
        )
        .unwrap();
        let part = Partition::new(4, 2).unwrap();
        let mut combined = vec![0.0; 4];
        for owner in 0..2 {
            let mut block = ColumnBlock::from_system(&sys, part, owner);
            for s in 0..2 {
                // Re-stage the slab the shift would have delivered.
                let cols = column_block_indices(owner, s, part);
                block.start_col = cols.start;
                let mut slab = Vec::new();
                for i in 0..4 {
                    slab.extend_from_slice(&a.row(i)[cols.clone()]);
                }
                block.slab = slab;
                block.x_part = x[cols].to_vec();
                partial_product(&mut block);
            }
            for i in 0..4 {
                combined[i] += block.accumulator()[i];
            }
        }
        for i in 0..4 {
            let direct: f64 = (0..4).filter(|&j| j != i).map(|j| a[(i, j)] * x[j]).sum();
            assert!((combined[i] - direct).abs() < 1e-15, "row {i}");
        }
    }

    #[test]
    fn single_rank_matches_serial_bitwise() {
        let sys = sys_2x2();
        let serial = solve_serial(&sys);
        let parallel = solve_columnwise(&sys, 1).unwrap();
        assert_eq!(parallel.outcome, serial);
        let reference = solve_columnwise_allreduce(&sys, 1).unwrap();
        assert_eq!(reference.outcome, serial);
    }

    #[test]
    fn shift_bytes_follow_the_closed_form() {
        // Hand-traced p = 2, n = 4, m = 2: one shift of an 8-element slab
        // plus a 2-element block per rank per iteration, 80 bytes.
        let a = DenseMatrix::from_fn(4, 4, |i, j| if i == j { 10.0 } else { 0.5 });
        let sys = SystemInstance::with_iteration_budget(
            a,
            DenseVector::new(vec![1.0; 4]).unwrap(),
            DenseVector::zeros(4),
            3,
        )
        .unwrap();
        let solve = solve_columnwise(&sys, 2).unwrap();
        for stats in &solve.stats {
            assert_eq!(stats.point_to_point_bytes, 3 * 80);
        }
    }
}
