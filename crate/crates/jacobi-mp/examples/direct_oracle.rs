//! Cross-check the iterative solvers against Gaussian elimination with
//! partial pivoting, and watch the contraction bound at work.
//!
//! Run with: cargo run --example direct_oracle

use jacobi_mp::bench::{generate_system, solve_direct};
use jacobi_mp::linalg::iteration_matrix_infinity_norm;
use jacobi_mp::serial::solve_serial_traced;

fn main() {
    let n = 24;
    let sys = generate_system(n, 7, true, 1e-12, 10_000).expect("valid generated system");

    let (direct, residual) = solve_direct(&sys).expect("non-singular");
    println!("elimination residual |Ax - b| (max component): {residual:.3e}");

    let (outcome, trace) = solve_serial_traced(&sys);
    println!("jacobi converged after {} iterations", outcome.iterations);

    let worst = (0..n)
        .map(|i| (outcome.x[i] - direct[i]).abs())
        .fold(0.0f64, f64::max);
    println!("max |jacobi - elimination| componentwise: {worst:.3e}");

    // The infinity norm of the iteration matrix bounds how fast the error
    // can shrink; print the measured error against the envelope every few
    // iterations.
    let t_norm = iteration_matrix_infinity_norm(sys.a()).unwrap();
    let e0 = (0..n).map(|i| direct[i].abs()).fold(0.0f64, f64::max);
    println!("iteration-matrix norm {t_norm:.4}; contraction envelope vs measured error:");
    let mut bound = e0;
    for (k, iterate) in trace.iter().enumerate() {
        bound *= t_norm;
        if (k + 1) % 5 != 0 {
            continue;
        }
        let err = iterate
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - direct[i]).abs())
            .fold(0.0f64, f64::max);
        println!("  iteration {:>3}: error {err:.3e} <= bound {bound:.3e}", k + 1);
    }
}
