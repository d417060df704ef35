//! Row-wise parallel Jacobi: cyclic shift of the unknown blocks, blocking
//! and non-blocking modes, and what each rank's traffic looks like.
//!
//! Run with: cargo run --example rowwise_shift

use jacobi_mp::bench::generate_system;
use jacobi_mp::rowwise::{solve_rowwise, ShiftMode};
use jacobi_mp::solve_serial;

fn main() {
    let n = 16;
    let p = 4;
    let sys = generate_system(n, 42, true, 1e-10, 1000).expect("valid generated system");

    let serial = solve_serial(&sys);
    println!("serial:      {} iterations, converged = {}", serial.iterations, serial.converged);

    for mode in [ShiftMode::Blocking, ShiftMode::Nonblocking] {
        let solve = solve_rowwise(&sys, p, mode).expect("rowwise solve");
        let outcome = &solve.outcome;
        println!("row {mode:>11}: {} iterations, converged = {}", outcome.iterations, outcome.converged);

        // Every rank ships its m-element block p-1 times per iteration.
        let m = n / p;
        let expected = (outcome.iterations * (p - 1) * m * 8) as u64;
        for (rank, stats) in solve.stats.iter().enumerate() {
            println!(
                "  rank {rank}: shift {} B (expected {expected}), collective {} B, {} messages",
                stats.point_to_point_bytes, stats.collective_bytes, stats.point_to_point_messages
            );
            assert_eq!(stats.point_to_point_bytes, expected);
        }

        let worst = (0..n)
            .map(|i| (outcome.x[i] - serial.x[i]).abs())
            .fold(0.0f64, f64::max)
            / serial.x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        println!("  max relative deviation from serial: {worst:.3e}");
    }
}
