use crate::linalg::{DenseMatrix, DenseVector, LinalgError, SystemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draws the coefficient matrix and constant vector for an `n`-dimensional
/// random system. Entries are uniform in `[0, 1)` from a seeded generator,
/// so the same `(n, seed)` pair always yields bitwise-identical data.
///
/// With `dominant` set, each diagonal entry is then overwritten with its
/// row's off-diagonal absolute sum plus one, forcing strict diagonal
/// dominance: raw uniform matrices generally diverge under Jacobi, which is
/// fine for timing runs but useless for correctness checks. The overwrite
/// happens after drawing, so the two modes consume identical random streams
/// and differ only on the diagonal.
pub fn generate_parts(n: usize, seed: u64, dominant: bool) -> (DenseMatrix, DenseVector) {
    assert!(n >= 1, "dimension must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries: Vec<f64> = (0..n * n).map(|_| rng.gen::<f64>()).collect();
    let b: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    if dominant {
        for i in 0..n {
            let row = &entries[i * n..(i + 1) * n];
            let off: f64 = row
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.abs())
                .sum();
            entries[i * n + i] = off + 1.0;
        }
    }
    let a = DenseMatrix::new(n, n, entries).expect("generated entries are finite");
    let b = DenseVector::new(b).expect("generated entries are finite");
    (a, b)
}

/// A full instance around [`generate_parts`], with a zero initial guess.
pub fn generate_system(
    n: usize,
    seed: u64,
    dominant: bool,
    tol: f64,
    max_iters: usize,
) -> Result<SystemInstance, LinalgError> {
    let (a, b) = generate_parts(n, seed, dominant);
    SystemInstance::new(a, b, DenseVector::zeros(n), tol, max_iters)
}
