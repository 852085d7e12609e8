//! Affine-subspace enumeration and containment searches: the largest affine
//! subspace inside a point set, and affine subspaces on which a polynomial
//! map restricts to degree ≤ 1.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::f2core::{AffineSubspace, F2Vector};
use crate::impossibility::SupportSet;
use crate::polymap::PolyMap;

/// Maximum dimension accepted by [`largest_affine_in_set`].
pub const MAX_AFFINE_CAP_DIM: usize = 4;

/// Maximum ambient width accepted by [`exists_linearizing_subspace`].
pub const MAX_LINEARIZE_VARS: usize = 10;

/// Maximum subspace dimension accepted by [`exists_linearizing_subspace`].
pub const MAX_LINEARIZE_DIM: usize = 3;

/// All `s`-dimensional linear subspaces of `F₂^m`, one reduced-echelon basis
/// each (row masks with ascending pivots), in a fixed deterministic order.
///
/// Every subspace has exactly one such basis: pick the pivot columns, then
/// fill the non-pivot columns to the right of each pivot freely.
pub(crate) fn rref_linear_bases(m: usize, s: usize) -> impl Iterator<Item = Vec<u64>> {
    assert!(m <= 26, "linear subspace enumeration capped at 26 variables");
    (0..m).combinations(s).flat_map(move |pivots| {
        let is_pivot: u64 = pivots.iter().fold(0, |acc, &p| acc | 1 << p);
        // Free slots, row-major: (row, column) with column a non-pivot to the
        // right of that row's pivot.
        let slots: Vec<(usize, usize)> = pivots
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| {
                (p + 1..m).filter(move |c| is_pivot >> c & 1 == 0).map(move |c| (i, c))
            })
            .collect();
        let pivots = pivots.clone();
        (0..1u64 << slots.len()).map(move |fill| {
            let mut rows: Vec<u64> = pivots.iter().map(|&p| 1 << p).collect();
            for (bit, &(row, col)) in slots.iter().enumerate() {
                if fill >> bit & 1 == 1 {
                    rows[row] |= 1 << col;
                }
            }
            rows
        })
    })
}

/// All affine subspaces of dimension `s` in `F₂^m`, lazily, in a fixed
/// deterministic order.
///
/// Each subspace appears exactly once: the direction space is enumerated via
/// its unique reduced-echelon basis and each coset via its unique
/// representative with zeros in every pivot coordinate.
pub fn enumerate_affine_subspaces(m: usize, s: usize) -> impl Iterator<Item = AffineSubspace> {
    assert!(m <= 26, "affine subspace enumeration capped at 26 variables");
    rref_linear_bases(m, s).flat_map(move |rows| {
        let pivot_mask: u64 =
            rows.iter().fold(0, |acc, &r| acc | (1 << r.trailing_zeros().min(63)));
        let non_pivots: Vec<usize> = (0..m).filter(|&c| pivot_mask >> c & 1 == 0).collect();
        (0..1u64 << non_pivots.len()).map(move |spread| {
            let mut offset = 0u64;
            for (bit, &c) in non_pivots.iter().enumerate() {
                if spread >> bit & 1 == 1 {
                    offset |= 1 << c;
                }
            }
            AffineSubspace::new(
                m,
                F2Vector::from_index(offset, m),
                rows.iter().map(|&r| F2Vector::from_index(r, m)),
            )
        })
    })
}

/// Finds the largest-dimension affine subspace contained in `T`, up to
/// `cap_dim`, together with a witness.
///
/// For each anchor `u ∈ T` in ascending order, runs a depth-first search over
/// direction vectors from `T + u` in ascending order, keeping the invariant
/// that the current linear span lies inside `T + u`; a direction `d` extends
/// the span exactly when `d + span ⊆ T + u`. The search stops as soon as the
/// cap is reached; the witness is the first one found at the winning
/// dimension, hence deterministic.
pub fn largest_affine_in_set(
    t: &SupportSet,
    cap_dim: usize,
) -> Result<(usize, AffineSubspace)> {
    if cap_dim > MAX_AFFINE_CAP_DIM {
        return Err(Error::CapExceeded {
            what: "affine search dimension",
            requested: cap_dim as u128,
            limit: MAX_AFFINE_CAP_DIM as u128,
        });
    }
    t.check_size("affine search support")?;
    let n = t.n();
    let elems = t.indices();
    let point = |idx: u64| F2Vector::from_index(idx, n);
    let subspace = |u: u64, dirs: &[u64]| {
        AffineSubspace::new(n, point(u), dirs.iter().map(|&d| point(d)))
    };
    let mut best = (0usize, subspace(elems[0], &[]));
    if cap_dim == 0 {
        return Ok(best);
    }
    for &u in &elems {
        // Directions available around u, ascending: (T + u) \ {0}.
        let mut dirs: Vec<u64> = elems.iter().map(|&x| x ^ u).filter(|&d| d != 0).collect();
        dirs.sort_unstable();
        let shifted: std::collections::HashSet<u64> = dirs.iter().copied().collect();
        let mut chosen: Vec<u64> = Vec::new();
        let mut span: Vec<u64> = vec![0];
        if grow_span(&dirs, &shifted, 0, &mut chosen, &mut span, cap_dim, &mut |basis| {
            if basis.len() > best.0 {
                best = (basis.len(), subspace(u, basis));
            }
        }) {
            break;
        }
    }
    for p in best.1.points() {
        assert!(t.contains(&p), "affine witness failed re-verification");
    }
    Ok(best)
}

/// Depth-first span growth; invokes `record` at every strict improvement and
/// returns true once `cap` is reached (terminating the whole search).
fn grow_span(
    dirs: &[u64],
    inside: &std::collections::HashSet<u64>,
    start: usize,
    chosen: &mut Vec<u64>,
    span: &mut Vec<u64>,
    cap: usize,
    record: &mut impl FnMut(&[u64]),
) -> bool {
    if chosen.len() == cap {
        return true;
    }
    for (i, &d) in dirs.iter().enumerate().skip(start) {
        if span.contains(&d) {
            continue;
        }
        // The doubled span needs room inside T + u.
        if inside.len() + 1 < 2 * span.len() {
            return false;
        }
        if !span.iter().all(|&p| p == 0 || inside.contains(&(p ^ d))) || !inside.contains(&d) {
            continue;
        }
        let added: Vec<u64> = span.iter().map(|&p| p ^ d).collect();
        let old_len = span.len();
        span.extend(added);
        chosen.push(d);
        record(chosen);
        if grow_span(dirs, inside, i + 1, chosen, span, cap, record) {
            return true;
        }
        chosen.pop();
        span.truncate(old_len);
    }
    false
}

/// Searches for an affine subspace of dimension `s` on which every output of
/// `p` restricts to degree ≤ 1, in the deterministic order of
/// [`enumerate_affine_subspaces`].
pub fn exists_linearizing_subspace(p: &PolyMap, s: usize) -> Result<Option<AffineSubspace>> {
    let m = p.inputs();
    if m > MAX_LINEARIZE_VARS {
        return Err(Error::CapExceeded {
            what: "linearizing search variables",
            requested: m as u128,
            limit: MAX_LINEARIZE_VARS as u128,
        });
    }
    if s > MAX_LINEARIZE_DIM {
        return Err(Error::CapExceeded {
            what: "linearizing subspace dimension",
            requested: s as u128,
            limit: MAX_LINEARIZE_DIM as u128,
        });
    }
    if s > m {
        return Ok(None);
    }
    Ok(enumerate_affine_subspaces(m, s)
        .find(|u| p.outputs().iter().all(|q| q.restrict_to_subspace(u).degree() <= 1)))
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use super::*;
    use crate::impossibility::sidon_source;
    use crate::polymap::MultilinearPoly;

    /// Number of s-dimensional subspaces of F_2^m (Gaussian binomial);
    /// dividing by (2^{i+1} − 1) right after the i-th factor keeps every
    /// intermediate value an integer (it is a smaller Gaussian binomial).
    fn gaussian(m: usize, s: usize) -> u64 {
        let mut out = 1u64;
        for i in 0..s {
            out *= (1u64 << (m - i)) - 1;
            out /= (1u64 << (i + 1)) - 1;
        }
        out
    }

    #[test]
    fn enumeration_counts_and_uniqueness() {
        for (m, s) in [(3, 0), (3, 1), (3, 2), (3, 3), (4, 2), (5, 1)] {
            let all: Vec<AffineSubspace> = enumerate_affine_subspaces(m, s).collect();
            let expected = gaussian(m, s) * (1u64 << (m - s));
            assert_eq!(all.len() as u64, expected, "m={m} s={s}");
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), all.len());
            for u in &all {
                assert_eq!(u.dim(), s);
                assert_eq!(u.ambient(), m);
            }
        }
    }

    #[test]
    fn enumeration_covers_every_point_once_at_dim_zero() {
        let pts: Vec<u64> =
            enumerate_affine_subspaces(3, 0).map(|u| u.offset().index()).collect();
        let mut sorted = pts.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn full_space_reaches_the_cap() {
        let t = SupportSet::full_space(4).unwrap();
        let (dim, witness) = largest_affine_in_set(&t, 2).unwrap();
        assert_eq!(dim, 2);
        assert_eq!(witness.dim(), 2);
        let (dim4, _) = largest_affine_in_set(&t, 4).unwrap();
        assert_eq!(dim4, 4);
    }

    #[test]
    fn small_space_saturates_below_the_cap() {
        let t = SupportSet::full_space(3).unwrap();
        let (dim, witness) = largest_affine_in_set(&t, 4).unwrap();
        assert_eq!(dim, 3);
        assert_eq!(witness, AffineSubspace::full_space(3));
    }

    #[test]
    fn singleton_has_dimension_zero() {
        let t = SupportSet::from_vectors([F2Vector::from_index(5, 3)]).unwrap();
        let (dim, witness) = largest_affine_in_set(&t, 4).unwrap();
        assert_eq!(dim, 0);
        assert_eq!(witness, AffineSubspace::single_point(F2Vector::from_index(5, 3)));
    }

    #[test]
    fn planted_coset_is_found() {
        // A 2-dimensional coset plus two stray points; the strays differ
        // from each other and from the coset in the low bit, so they extend
        // nothing.
        let coset = [0b1001u64, 0b1011, 0b1101, 0b1111];
        let strays = [0b0000u64, 0b0001];
        let t = SupportSet::new(
            4,
            coset.iter().chain(&strays).map(|&i| F2Vector::from_index(i, 4)),
        )
        .unwrap();
        let (dim, witness) = largest_affine_in_set(&t, 2).unwrap();
        assert_eq!(dim, 2);
        for p in witness.points() {
            assert!(coset.contains(&p.index()));
        }
    }

    #[test]
    fn sidon_supports_contain_no_coset() {
        for t in 2..=4 {
            let src = sidon_source(t).unwrap();
            let support = SupportSet::from_vectors(src.support()).unwrap();
            let (dim, _) = largest_affine_in_set(&support, 2).unwrap();
            assert!(dim <= 1, "t={t} gave dimension {dim}");
        }
    }

    #[test]
    fn affine_cap_is_enforced() {
        let t = SupportSet::full_space(2).unwrap();
        assert!(matches!(largest_affine_in_set(&t, 5), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn linear_maps_linearize_on_the_full_space() {
        let p = PolyMap::identity(2);
        let u = exists_linearizing_subspace(&p, 2).unwrap().unwrap();
        assert_eq!(u, AffineSubspace::full_space(2));
    }

    #[test]
    fn a_single_product_does_not_linearize_at_full_dimension() {
        let p = PolyMap::new(2, vec![MultilinearPoly::new(2, [0b11u64])]);
        assert_eq!(exists_linearizing_subspace(&p, 2).unwrap(), None);
        // But every line works: a product restricted to a line is affine.
        let line = exists_linearizing_subspace(&p, 1).unwrap().unwrap();
        assert!(p.outputs()[0].restrict_to_subspace(&line).degree() <= 1);
    }

    #[test]
    fn planted_linearizing_subspace_is_found() {
        // Outputs x0*x2, x0*x3, x0*x2*x3 all vanish on the coset {x0 = 0}
        // intersected with {x1 = 0}.
        let p = PolyMap::new(
            4,
            vec![
                MultilinearPoly::new(4, [0b0101u64]),
                MultilinearPoly::new(4, [0b1001u64]),
                MultilinearPoly::new(4, [0b1101u64]),
            ],
        );
        let u = exists_linearizing_subspace(&p, 2).unwrap().unwrap();
        for q in p.outputs() {
            assert!(q.restrict_to_subspace(&u).degree() <= 1);
        }
    }

    #[test]
    fn degenerate_dimensions() {
        let p = PolyMap::identity(2);
        assert_eq!(exists_linearizing_subspace(&p, 3).unwrap(), None);
        // Dimension 0 always linearizes: a point restriction is constant.
        assert!(exists_linearizing_subspace(&p, 0).unwrap().is_some());
    }

    #[test]
    fn linearize_caps_are_enforced() {
        let p = PolyMap::identity(11);
        assert!(matches!(exists_linearizing_subspace(&p, 1), Err(Error::CapExceeded { .. })));
        let q = PolyMap::identity(4);
        assert!(matches!(exists_linearizing_subspace(&q, 4), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn random_quadratics_rarely_linearize_but_witnesses_are_honest() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut found = 0;
        for _ in 0..10 {
            let p = PolyMap::random(5, 5, 2, &mut rng);
            if let Some(u) = exists_linearizing_subspace(&p, 2).unwrap() {
                found += 1;
                for q in p.outputs() {
                    assert!(q.restrict_to_subspace(&u).degree() <= 1);
                }
            }
        }
        // Statistically this stays small; the loop above asserts honesty
        // regardless of the count.
        assert!(found <= 10);
    }
}
