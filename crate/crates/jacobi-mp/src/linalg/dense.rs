use super::{distance_slices, LinalgError};

/// Dense row-major matrix of 64-bit floats.
///
/// Entries are validated to be finite on construction; values are immutable
/// afterwards, so a matrix can be shared freely between concurrent workers.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if n_rows == 0 || n_cols == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if entries.len() != n_rows * n_cols {
            return Err(LinalgError::EntryCountMismatch {
                expected: n_rows * n_cols,
                got: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFiniteEntry(i));
        }
        Ok(Self { n_rows, n_cols, entries })
    }

    /// Builds a matrix by evaluating `f(row, col)` for every cell.
    ///
    /// Panics if a produced entry is non-finite; generators are expected to
    /// emit finite values by construction.
    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(n_rows >= 1 && n_cols >= 1, "dimensions must be at least 1");
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                entries.push(f(i, j));
            }
        }
        Self::new(n_rows, n_cols, entries).expect("generator produced a non-finite entry")
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_fn(n_rows, n_cols, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n_cols + col]
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (row, col): (usize, usize)) -> &f64 {
        &self.entries[row * self.n_cols + col]
    }
}

/// Dense vector of 64-bit floats; finite entries, length at least 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    entries: Vec<f64>,
}

impl DenseVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, LinalgError> {
        if entries.is_empty() {
            return Err(LinalgError::EmptyDimension);
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFiniteEntry(i));
        }
        Ok(Self { entries })
    }

    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "length must be at least 1");
        Self { entries: vec![0.0; len] }
    }

    /// Wraps entries already known to be finite (solver-internal results).
    pub(crate) fn from_computed(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.entries.iter()
    }
}

impl std::ops::Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// `sqrt(sum_i (x_i - y_i)^2)`, the stopping metric used by every solver.
pub fn euclidean_distance(x: &DenseVector, y: &DenseVector) -> Result<f64, LinalgError> {
    if x.len() != y.len() {
        return Err(LinalgError::LengthMismatch { left: x.len(), right: y.len() });
    }
    Ok(distance_slices(x.as_slice(), y.as_slice()))
}
