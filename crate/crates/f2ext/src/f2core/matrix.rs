use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::f2core::F2Vector;

/// A matrix over GF(2), stored as bit-packed rows of equal width.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct F2Matrix {
    cols: usize,
    rows: Vec<u64>,
}

impl F2Matrix {
    pub fn new(cols: usize, rows: Vec<F2Vector>) -> Self {
        assert!(cols <= super::vector::MAX_LEN);
        let rows = rows
            .into_iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "row width mismatch");
                r.index()
            })
            .collect();
        F2Matrix { cols, rows }
    }

    pub fn from_row_masks(cols: usize, rows: Vec<u64>) -> Self {
        assert!(cols <= super::vector::MAX_LEN);
        for &r in &rows {
            assert!(cols == 64 || r < 1u64 << cols, "row exceeds declared width");
        }
        F2Matrix { cols, rows }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix {
            cols: n,
            rows: (0..n).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        F2Matrix {
            cols,
            rows: vec![0; rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> F2Vector {
        F2Vector::from_index(self.rows[i], self.cols)
    }

    pub fn row_masks(&self) -> &[u64] {
        &self.rows
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vector(&self, x: &F2Vector) -> F2Vector {
        assert_eq!(x.len(), self.cols, "vector width mismatch");
        let mut bits = 0u64;
        for (i, &r) in self.rows.iter().enumerate() {
            if (r & x.index()).count_ones() & 1 == 1 {
                bits |= 1 << i;
            }
        }
        F2Vector::from_index(bits, self.rows.len())
    }

    /// Rank by Gaussian elimination on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let bit = 1u64 << col;
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Solves `M x = b`. Returns `None` when the system is inconsistent,
    /// otherwise a particular solution together with a canonical basis of
    /// the kernel (one vector per free column, ascending).
    pub fn solve_affine(&self, b: &F2Vector) -> Option<(F2Vector, Vec<F2Vector>)> {
        assert_eq!(b.len(), self.rows(), "right-hand side width mismatch");
        // Augmented rows: column `cols` holds the right-hand side.
        let mut rows: Vec<u64> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, &r)| r | (b.index() >> i & 1) << self.cols)
            .collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let bit = 1u64 << col;
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let rhs_bit = 1u64 << self.cols;
        if rows[rank..].iter().any(|&r| r & rhs_bit != 0) {
            return None;
        }
        let mut particular = 0u64;
        for (i, &p) in pivots.iter().enumerate() {
            if rows[i] & rhs_bit != 0 {
                particular |= 1 << p;
            }
        }
        let mut kernel = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut v = 1u64 << free;
            for (i, &p) in pivots.iter().enumerate() {
                if rows[i] >> free & 1 == 1 {
                    v |= 1 << p;
                }
            }
            kernel.push(F2Vector::from_index(v, self.cols));
        }
        Some((F2Vector::from_index(particular, self.cols), kernel))
    }

    /// Samples a uniformly random full-rank matrix by rejection.
    pub fn sample_full_rank(rows: usize, cols: usize, rng: &mut impl Rng) -> Result<F2Matrix> {
        assert!(rows <= cols, "a {rows}x{cols} matrix cannot have full row rank");
        const ATTEMPTS: usize = 1000;
        let mask = if cols == 64 { u64::MAX } else { (1u64 << cols) - 1 };
        for _ in 0..ATTEMPTS {
            let m = F2Matrix {
                cols,
                rows: (0..rows).map(|_| rng.random::<u64>() & mask).collect(),
            };
            if m.rank() == rows {
                return Ok(m);
            }
        }
        Err(Error::RankSamplingFailed {
            rows,
            cols,
            attempts: ATTEMPTS,
        })
    }
}

impl Serialize for F2Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq((0..self.rows()).map(|i| self.row(i)))
    }
}

impl<'de> Deserialize<'de> for F2Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<F2Vector>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, F2Vector::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("matrix rows have unequal widths"));
        }
        Ok(F2Matrix::new(cols, rows))
    }
}
