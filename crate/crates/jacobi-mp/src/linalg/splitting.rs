use super::{DenseMatrix, LinalgError};

/// The decomposition `A = D - L - U` of a square matrix.
///
/// Sign convention: `L` and `U` hold the *negated* off-diagonal entries
/// (`L[i][j] = -a[i][j]` for `i > j`, `U[i][j] = -a[i][j]` for `i < j`), so
/// the iteration matrix `T = D^-1 (L + U)` can be formed from them directly,
/// and reconstruction is `D - L - U`.
///
/// Both the raw diagonal and its reciprocals are kept: reconstruction and the
/// update step need the original `a[i][i]` bits (dividing by the diagonal is
/// not the same rounding as multiplying by a stored reciprocal), while the
/// iteration-matrix norm wants `1/a[i][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    diagonal: Vec<f64>,
    d_inverse_diagonal: Vec<f64>,
    strictly_lower: DenseMatrix,
    strictly_upper: DenseMatrix,
}

impl Splitting {
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn d_inverse_diagonal(&self) -> &[f64] {
        &self.d_inverse_diagonal
    }

    pub fn strictly_lower(&self) -> &DenseMatrix {
        &self.strictly_lower
    }

    pub fn strictly_upper(&self) -> &DenseMatrix {
        &self.strictly_upper
    }

    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    /// Rebuilds the source matrix as `D - L - U`. Exact: the splitting only
    /// copies and negates entries, so this is a bitwise inverse of `split`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.dimension();
        DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diagonal[i]
            } else if i > j {
                -self.strictly_lower[(i, j)]
            } else {
                -self.strictly_upper[(i, j)]
            }
        })
    }
}

/// Splits a square matrix with nonzero diagonal into `D`, `L`, `U`.
pub fn split(a: &DenseMatrix) -> Result<Splitting, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.n_rows(), cols: a.n_cols() });
    }
    let n = a.n_rows();
    let mut diagonal = Vec::with_capacity(n);
    let mut d_inverse_diagonal = Vec::with_capacity(n);
    for i in 0..n {
        let d = a[(i, i)];
        if d == 0.0 {
            return Err(LinalgError::ZeroDiagonal(i));
        }
        diagonal.push(d);
        d_inverse_diagonal.push(1.0 / d);
    }
    let strictly_lower = DenseMatrix::from_fn(n, n, |i, j| if i > j { -a[(i, j)] } else { 0.0 });
    let strictly_upper = DenseMatrix::from_fn(n, n, |i, j| if i < j { -a[(i, j)] } else { 0.0 });
    Ok(Splitting { diagonal, d_inverse_diagonal, strictly_lower, strictly_upper })
}

/// True iff `|a[i][i]| > sum_{j != i} |a[i][j]|` for every row, the standard
/// sufficient condition for Jacobi convergence.
pub fn is_strictly_diagonally_dominant(a: &DenseMatrix) -> bool {
    assert!(a.is_square(), "dominance is defined for square matrices");
    (0..a.n_rows()).all(|i| {
        let row = a.row(i);
        let off: f64 = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.abs())
            .sum();
        row[i].abs() > off
    })
}

/// Infinity norm of the iteration matrix `T = D^-1 (L + U)`:
/// `max_i sum_{j != i} |a[i][j]| / |a[i][i]|`. Bounds the per-step error
/// contraction when it is below 1.
pub fn iteration_matrix_infinity_norm(a: &DenseMatrix) -> Result<f64, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.n_rows(), cols: a.n_cols() });
    }
    let mut worst = 0.0f64;
    for i in 0..a.n_rows() {
        let row = a.row(i);
        if row[i] == 0.0 {
            return Err(LinalgError::ZeroDiagonal(i));
        }
        let off: f64 = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v.abs())
            .sum();
        worst = worst.max(off / row[i].abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> DenseMatrix {
        DenseMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap()
    }

    fn three_by_three() -> DenseMatrix {
        DenseMatrix::new(3, 3, vec![4.0, -2.0, 1.0, 1.0, 5.0, -3.0, 2.0, 2.0, 6.0]).unwrap()
    }

    #[test]
    fn split_identity() {
        let s = split(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(s.d_inverse_diagonal(), &[1.0, 1.0]);
        assert_eq!(s.strictly_lower(), &DenseMatrix::zeros(2, 2));
        assert_eq!(s.strictly_upper(), &DenseMatrix::zeros(2, 2));
    }

    #[test]
    fn split_negates_off_diagonal() {
        let s = split(&two_by_two()).unwrap();
        assert_eq!(s.d_inverse_diagonal(), &[0.5, 1.0 / 3.0]);
        assert_eq!(s.strictly_lower()[(1, 0)], -1.0);
        assert_eq!(s.strictly_upper()[(0, 1)], -1.0);
        assert_eq!(s.strictly_lower()[(0, 1)], 0.0);
        assert_eq!(s.strictly_upper()[(1, 0)], 0.0);
    }

    #[test]
    fn split_zero_diagonal() {
        let a = DenseMatrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(split(&a).unwrap_err(), LinalgError::ZeroDiagonal(0));
    }

    #[test]
    fn reconstruct_is_exact() {
        let a = three_by_three();
        assert_eq!(split(&a).unwrap().reconstruct(), a);
    }

    #[test]
    fn dominance_examples() {
        assert!(is_strictly_diagonally_dominant(&two_by_two()));
        let ones = DenseMatrix::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(!is_strictly_diagonally_dominant(&ones));
        // Row sums by hand: 4 > 3, 5 > 4, 6 > 4.
        assert!(is_strictly_diagonally_dominant(&three_by_three()));
    }

    #[test]
    fn iteration_norm_examples() {
        assert_eq!(iteration_matrix_infinity_norm(&DenseMatrix::identity(3)).unwrap(), 0.0);
        assert_eq!(iteration_matrix_infinity_norm(&two_by_two()).unwrap(), 0.5);
        // Row ratios by hand: 3/4, 4/5, 4/6 -> max 0.8.
        assert_eq!(iteration_matrix_infinity_norm(&three_by_three()).unwrap(), 0.8);
    }

    #[test]
    fn iteration_norm_zero_diagonal() {
        let a = DenseMatrix::new(2, 2, vec![1.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(iteration_matrix_infinity_norm(&a).unwrap_err(), LinalgError::ZeroDiagonal(1));
    }
}
