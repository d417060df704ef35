//! One-sided parallel Jacobi: an extra target rank owns two memory windows
//! (previous and next iterate); workers get/put through epochs and the
//! target measures convergence locally.
//!
//! Run with: cargo run --example onesided_windows

use jacobi_mp::bench::generate_system;
use jacobi_mp::onesided::solve_onesided;
use jacobi_mp::runtime::WindowOp;
use jacobi_mp::solve_serial;

fn main() {
    let n = 16;
    let p = 4; // workers; the job runs p + 1 ranks
    let sys = generate_system(n, 42, true, 1e-10, 1000).expect("valid generated system");

    let solve = solve_onesided(&sys, p).expect("onesided solve");
    let outcome = &solve.outcome;
    let serial = solve_serial(&sys);

    println!(
        "onesided: {} iterations over {} ranks ({} workers + 1 target), converged = {}",
        outcome.iterations,
        p + 1,
        p,
        outcome.converged
    );
    println!(
        "iterates match serial bitwise: {}",
        outcome.x.as_slice() == serial.x.as_slice()
    );

    let m = n / p;
    let iters = outcome.iterations as u64;
    println!("window traffic per worker (whole vector in, own block out):");
    for rank in 0..p {
        let stats = &solve.stats[rank];
        println!(
            "  worker {rank}: get {} B (= iterations * n * 8), put {} B (= (iterations + 1) * m * 8)",
            stats.window_get_bytes, stats.window_put_bytes
        );
        assert_eq!(stats.window_get_bytes, iters * (n as u64) * 8);
        assert_eq!(stats.window_put_bytes, (iters + 1) * (m as u64) * 8);
    }
    let target = &solve.stats[p];
    println!(
        "  target: get {} B, put {} B (its new -> old copy is local), broadcast {} B",
        target.window_get_bytes, target.window_put_bytes, target.collective_bytes
    );

    // The access logs show the epoch discipline: the old window is seeded
    // once and then only read; the new window is only written.
    let old_log = &solve.window_logs[0];
    let gets = old_log.accesses.iter().filter(|a| a.op == WindowOp::Get).count();
    let puts = old_log.accesses.iter().filter(|a| a.op == WindowOp::Put).count();
    println!("old window: {puts} seeding puts, {gets} gets across all epochs");
    let new_log = &solve.window_logs[1];
    println!(
        "new window: {} puts, 0 gets",
        new_log.accesses.iter().filter(|a| a.op == WindowOp::Put).count()
    );
}
