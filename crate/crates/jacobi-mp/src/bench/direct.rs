use crate::linalg::{DenseVector, SystemInstance};
use thiserror::Error;

/// Pivot magnitudes at or below this are treated as numerically zero.
const PIVOT_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("matrix is numerically singular: pivot {pivot:e} at column {column}")]
pub struct SingularMatrix {
    pub column: usize,
    pub pivot: f64,
}

/// Gaussian elimination with partial pivoting; the independent reference the
/// iterative solvers are validated against. Returns the solution and the
/// infinity norm of its residual `A x - b`.
pub fn solve_direct(sys: &SystemInstance) -> Result<(DenseVector, f64), SingularMatrix> {
    let n = sys.dimension();
    let a = sys.a();
    let b = sys.b();

    // Augmented working copy [A | b].
    let width = n + 1;
    let mut work = vec![0.0; n * width];
    for i in 0..n {
        work[i * width..i * width + n].copy_from_slice(a.row(i));
        work[i * width + n] = b[i];
    }

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                work[r * width + col]
                    .abs()
                    .total_cmp(&work[s * width + col].abs())
            })
            .expect("non-empty pivot range");
        let pivot = work[pivot_row * width + col];
        if pivot.abs() <= PIVOT_FLOOR {
            return Err(SingularMatrix { column: col, pivot });
        }
        if pivot_row != col {
            for k in 0..width {
                work.swap(col * width + k, pivot_row * width + k);
            }
        }
        for row in col + 1..n {
            let factor = work[row * width + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..width {
                work[row * width + k] -= factor * work[col * width + k];
            }
        }
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = work[i * width + n];
        for j in i + 1..n {
            sum -= work[i * width + j] * x[j];
        }
        x[i] = sum / work[i * width + i];
    }

    let mut residual = 0.0f64;
    for i in 0..n {
        let row = a.row(i);
        let ax: f64 = row.iter().zip(&x).map(|(c, v)| c * v).sum();
        residual = residual.max((ax - b[i]).abs());
    }
    Ok((DenseVector::from_computed(x), residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::generate_system;
    use crate::linalg::DenseMatrix;
    use crate::serial::solve_serial;

    fn instance(a: DenseMatrix, b: Vec<f64>) -> SystemInstance {
        let n = a.n_rows();
        SystemInstance::new(a, DenseVector::new(b).unwrap(), DenseVector::zeros(n), 1e-8, 10).unwrap()
    }

    #[test]
    fn identity_returns_the_constants() {
        let sys = instance(DenseMatrix::identity(3), vec![4.0, -5.0, 6.0]);
        let (x, residual) = solve_direct(&sys).unwrap();
        assert_eq!(x.as_slice(), &[4.0, -5.0, 6.0]);
        assert_eq!(residual, 0.0);
    }

    #[test]
    fn two_by_two_exact_solution() {
        let sys = instance(DenseMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap(), vec![3.0, 4.0]);
        let (x, residual) = solve_direct(&sys).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 1.0).abs() < 1e-14);
        assert!(residual < 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        // Row 2 = 2 * row 1.
        let sys = instance(
            DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap(),
            vec![1.0, 2.0],
        );
        let err = solve_direct(&sys).unwrap_err();
        assert_eq!(err.column, 1);
    }

    #[test]
    fn pivoting_handles_reordering() {
        // Leading entry is tiny relative to the column below it.
        let sys = instance(
            DenseMatrix::new(2, 2, vec![1e-12, 1.0, 1.0, 1.0]).unwrap(),
            vec![1.0, 2.0],
        );
        let (x, residual) = solve_direct(&sys).unwrap();
        assert!(residual < 1e-12, "residual {residual}");
        // Exact solution is close to x = [1, 1].
        assert!((x[0] - 1.0).abs() < 1e-9);
        assert!((x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn jacobi_cross_validates_against_elimination() {
        let sys = generate_system(16, 42, true, 1e-12, 10_000).unwrap();
        let jacobi = solve_serial(&sys);
        assert!(jacobi.converged);
        let (direct, residual) = solve_direct(&sys).unwrap();
        assert!(residual < 1e-10);
        for i in 0..16 {
            assert!(
                (jacobi.x[i] - direct[i]).abs() < 1e-8,
                "component {i}: {} vs {}",
                jacobi.x[i],
                direct[i]
            );
        }
    }
}
