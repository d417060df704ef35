//! Solve a small dense system with the serial Jacobi reference.
//!
//! Run with: cargo run --example serial_solve

use jacobi_mp::linalg::{parse_system, DenseVector, SystemInstance};
use jacobi_mp::solve_serial;

fn main() {
    // Systems can come from the plain-text format the benchmark CLI also
    // reads: dimension, coefficient rows, constants, optional initial guess.
    let text = "\
4
10  1   2   0.5
 2  9  -1   1
 0  3  12   2
 1 -2   4  11
13.5 11 17 14
";
    let parsed = parse_system(text).expect("well-formed system text");
    let n = parsed.a.n_rows();
    let x0 = parsed.x0.unwrap_or_else(|| DenseVector::zeros(n));
    let sys = SystemInstance::new(parsed.a, parsed.b, x0, 1e-10, 1000).expect("valid system");

    let outcome = solve_serial(&sys);

    println!("converged: {} after {} iterations", outcome.converged, outcome.iterations);
    println!("solution:  {:?}", outcome.x.as_slice());
    println!("last distances between consecutive iterates:");
    for (k, d) in outcome
        .distance_history
        .iter()
        .enumerate()
        .rev()
        .take(5)
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
    {
        println!("  iteration {:>3}: {d:.3e}", k + 1);
    }

    // The update is a contraction here, so the residual is tiny.
    let mut worst = 0.0f64;
    for i in 0..n {
        let ax: f64 = (0..n).map(|j| sys.a()[(i, j)] * outcome.x[j]).sum();
        worst = worst.max((ax - sys.b()[i]).abs());
    }
    println!("residual |Ax - b| (max component): {worst:.3e}");
}
