use super::LinalgError;
use std::ops::Range;

/// Block distribution of an `n`-dimensional system over `p` ranks.
///
/// Requires `p | n`; rank `r` owns the contiguous index block
/// `[r*m, (r+1)*m)` with `m = n / p`, used uniformly for matrix rows, matrix
/// columns, and vector entries. `p = 1` is the degenerate serial layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    p: usize,
    m: usize,
}

impl Partition {
    pub fn new(n: usize, p: usize) -> Result<Self, LinalgError> {
        if n == 0 || p == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if n % p != 0 {
            return Err(LinalgError::IndivisibleDimension { n, p });
        }
        Ok(Self { n, p, m: n / p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Block size `m = n / p`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// The contiguous index block owned by `rank`.
    pub fn block_range(&self, rank: usize) -> Range<usize> {
        assert!(rank < self.p, "rank {rank} out of range for p = {}", self.p);
        rank * self.m..(rank + 1) * self.m
    }

    pub fn row_range(&self, rank: usize) -> Range<usize> {
        self.block_range(rank)
    }

    pub fn column_range(&self, rank: usize) -> Range<usize> {
        self.block_range(rank)
    }

    pub fn vector_range(&self, rank: usize) -> Range<usize> {
        self.block_range(rank)
    }

    /// Rank owning global index `i`.
    pub fn owner_of(&self, i: usize) -> usize {
        assert!(i < self.n);
        i / self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_over_two() {
        let part = Partition::new(8, 2).unwrap();
        assert_eq!(part.m(), 4);
        assert_eq!(part.block_range(0), 0..4);
        assert_eq!(part.block_range(1), 4..8);
    }

    #[test]
    fn eight_over_eight() {
        let part = Partition::new(8, 8).unwrap();
        assert_eq!(part.m(), 1);
        for r in 0..8 {
            assert_eq!(part.block_range(r), r..r + 1);
        }
    }

    #[test]
    fn indivisible() {
        assert_eq!(
            Partition::new(8, 3),
            Err(LinalgError::IndivisibleDimension { n: 8, p: 3 })
        );
    }

    #[test]
    fn ranges_cover_all_divisors_exhaustively() {
        for n in 1..=1024usize {
            for p in 1..=n {
                if n % p != 0 {
                    continue;
                }
                let part = Partition::new(n, p).unwrap();
                let mut seen = vec![false; n];
                for r in 0..p {
                    for i in part.block_range(r) {
                        assert!(!seen[i], "index {i} covered twice (n={n}, p={p})");
                        seen[i] = true;
                        assert_eq!(part.owner_of(i), r);
                    }
                }
                assert!(seen.iter().all(|&s| s), "gap in cover (n={n}, p={p})");
            }
        }
    }
}
