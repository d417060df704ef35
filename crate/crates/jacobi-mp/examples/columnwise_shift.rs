//! Column-wise parallel Jacobi: both the coefficient slab and the unknown
//! block travel every step, which is why this distribution pays n + 1 times
//! the shift bytes of the row-wise one for the same iteration count.
//!
//! Run with: cargo run --example columnwise_shift

use jacobi_mp::bench::generate_system;
use jacobi_mp::columnwise::solve_columnwise;
use jacobi_mp::rowwise::{solve_rowwise, ShiftMode};

fn main() {
    let n = 16;
    let p = 4;
    let sys = generate_system(n, 42, true, 1e-10, 1000).expect("valid generated system");

    let col = solve_columnwise(&sys, p).expect("columnwise solve");
    let row = solve_rowwise(&sys, p, ShiftMode::Blocking).expect("rowwise solve");

    println!(
        "columnwise: {} iterations, converged = {}",
        col.outcome.iterations, col.outcome.converged
    );

    let m = n / p;
    let iters = col.outcome.iterations;
    println!("per-rank shift traffic over {iters} iterations:");
    for rank in 0..p {
        let col_bytes = col.stats[rank].point_to_point_bytes;
        let row_bytes = row.stats[rank].point_to_point_bytes;
        println!(
            "  rank {rank}: columnwise {col_bytes} B (slab {} B + x {} B per step), rowwise {row_bytes} B",
            (iters * (p - 1) * n * m * 8),
            (iters * (p - 1) * m * 8),
        );
        // The measured ratio is exactly n + 1.
        assert_eq!(col_bytes, row_bytes * (n as u64 + 1));
    }
    println!("columnwise / rowwise shift bytes = {} = n + 1", n + 1);

    let allreduce_total: u64 = col.stats.iter().map(|s| s.collective_bytes).sum();
    println!("columnwise collective traffic (allreduce + verdict): {allreduce_total} B total");
}
