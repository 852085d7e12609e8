use serde::{Deserialize, Serialize};

use crate::f2core::{F2Matrix, F2Vector};

/// A nonempty affine subspace `offset + span(basis)` of GF(2)^ambient.
///
/// The basis is always kept in reduced row-echelon form (pivot = lowest set
/// bit, one row per pivot, rows in ascending pivot order) and the offset is
/// reduced to have zero at every pivot. Two values represent the same point
/// set if and only if they are structurally equal, so the derived `Eq` and
/// `Hash` are set equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct AffineSubspace {
    ambient: usize,
    offset: F2Vector,
    basis: Vec<F2Vector>,
}

fn pivot(mask: u64) -> usize {
    mask.trailing_zeros() as usize
}

impl AffineSubspace {
    pub fn new(
        ambient: usize,
        offset: F2Vector,
        directions: impl IntoIterator<Item = F2Vector>,
    ) -> Self {
        assert_eq!(offset.len(), ambient, "offset width mismatch");
        let mut rows: Vec<u64> = directions
            .into_iter()
            .map(|d| {
                assert_eq!(d.len(), ambient, "direction width mismatch");
                d.index()
            })
            .collect();
        // Reduce the direction set to row-echelon form.
        let mut basis: Vec<u64> = Vec::new();
        for col in 0..ambient {
            let bit = 1u64 << col;
            let Some(i) = rows.iter().position(|&r| r & bit != 0) else {
                continue;
            };
            let p = rows.swap_remove(i);
            for r in rows.iter_mut() {
                if *r & bit != 0 {
                    *r ^= p;
                }
            }
            for b in basis.iter_mut() {
                if *b & bit != 0 {
                    *b ^= p;
                }
            }
            basis.push(p);
        }
        basis.sort_unstable_by_key(|&b| pivot(b));
        let mut off = offset.index();
        for &b in &basis {
            if off >> pivot(b) & 1 == 1 {
                off ^= b;
            }
        }
        AffineSubspace {
            ambient,
            offset: F2Vector::from_index(off, ambient),
            basis: basis
                .into_iter()
                .map(|b| F2Vector::from_index(b, ambient))
                .collect(),
        }
    }

    pub fn single_point(x: F2Vector) -> Self {
        Self::new(x.len(), x, [])
    }

    pub fn full_space(n: usize) -> Self {
        Self::new(n, F2Vector::zero(n), (0..n).map(|i| F2Vector::unit(i, n)))
    }

    /// The smallest affine subspace containing all of `points`.
    pub fn affine_hull(points: &[F2Vector]) -> Self {
        assert!(!points.is_empty(), "affine hull of an empty set");
        let p0 = points[0];
        Self::new(p0.len(), p0, points[1..].iter().map(|p| p.add(&p0)))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> u128 {
        1u128 << self.dim()
    }

    pub fn offset(&self) -> F2Vector {
        self.offset
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.basis
    }

    pub fn contains(&self, x: &F2Vector) -> bool {
        assert_eq!(x.len(), self.ambient, "point width mismatch");
        let mut r = x.index() ^ self.offset.index();
        for b in &self.basis {
            if r >> pivot(b.index()) & 1 == 1 {
                r ^= b.index();
            }
        }
        r == 0
    }

    /// All points, in the canonical order given by basis-subset index.
    pub fn points(&self) -> impl Iterator<Item = F2Vector> + '_ {
        assert!(self.dim() < 27, "point enumeration capped at dimension 26");
        (0u64..1 << self.dim()).map(move |s| {
            let mut v = self.offset.index();
            for (i, b) in self.basis.iter().enumerate() {
                if s >> i & 1 == 1 {
                    v ^= b.index();
                }
            }
            F2Vector::from_index(v, self.ambient)
        })
    }

    /// The translate `s + self`.
    pub fn translate(&self, s: &F2Vector) -> Self {
        Self::new(self.ambient, self.offset.add(s), self.basis.iter().copied())
    }

    /// Intersection as a point set; `None` when disjoint.
    pub fn intersect(&self, other: &AffineSubspace) -> Option<AffineSubspace> {
        assert_eq!(self.ambient, other.ambient, "ambient width mismatch");
        let n = self.ambient;
        let (da, db) = (self.dim(), other.dim());
        // Solve basis_a^T s + basis_b^T t = offset_a + offset_b, one equation
        // per ambient coordinate.
        let rows: Vec<F2Vector> = (0..n)
            .map(|i| {
                F2Vector::from_bits(
                    self.basis
                        .iter()
                        .map(|b| b.get(i))
                        .chain(other.basis.iter().map(|b| b.get(i))),
                )
            })
            .collect();
        let system = F2Matrix::new(da + db, rows);
        let rhs = self.offset.add(&other.offset);
        let (x0, kernel) = system.solve_affine(&rhs)?;
        let point_in_self = |coeffs: &F2Vector| {
            let mut v = F2Vector::zero(n);
            for (i, b) in self.basis.iter().enumerate() {
                if coeffs.get(i) {
                    v = v.add(b);
                }
            }
            v
        };
        let point = self.offset.add(&point_in_self(&x0));
        let dirs = kernel.iter().map(&point_in_self);
        let result = AffineSubspace::new(n, point, dirs);
        debug_assert!(other.contains(&result.offset));
        Some(result)
    }
}
