//! The directional-derivative structure algorithm for quadratic maps and its
//! companions: given a sumset relation `P(a) + P(b) = P(a+b) + y` on `A × B`,
//! the relation extends to a pair of affine subspaces; conversely, a
//! quadratic map can be certified to admit no such pair of a given dimension.
//!
//! For quadratic `P` the directional derivative `D_c(P)(z) = P(z+c) + P(z)`
//! is affine in `z`, so `S_c = {z : D_c(P)(z) = P(c) + y}` is an affine
//! subspace, and `b ∈ S_a ⟺ a ∈ S_b` once `y` is folded into the map. The
//! structure algorithm alternates `D ← ∩_{c∈C} S_c`, `C ← ∩_{d∈D} S_d` from
//! the affine hull of `A`; both sets only grow, so the iteration reaches a
//! fixpoint whose two sides satisfy the relation everywhere.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2core::{AffineSubspace, F2Matrix, F2Vector};
use crate::impossibility::affine::rref_linear_bases;
use crate::impossibility::{bits_and, bits_count, bits_set, Bits256, SupportSet};
use crate::polymap::PolyMap;
use crate::sources::NOBFSource;

/// Maximum input width accepted by [`sumset_structure_affine`].
pub const MAX_STRUCTURE_VARS: usize = 16;

/// Maximum input width accepted by [`certify_no_affine_sumset`].
pub const MAX_CERTIFY_VARS: usize = 8;

/// Maximum subspace dimension accepted by the certificate and its oracle.
pub const MAX_CERTIFY_DIM: usize = 2;

/// Maximum input width accepted by [`find_constant_quadratic_pair`].
pub const MAX_PAIR_SEARCH_VARS: usize = 6;

/// Solution set of `map(z) = rhs` for a degree ≤ 1 map, as an affine
/// subspace; `None` when the system is inconsistent.
fn affine_solution_set(map: &PolyMap, rhs: &F2Vector) -> Option<AffineSubspace> {
    debug_assert!(map.degree() <= 1, "solution sets need an affine map");
    let m = map.inputs();
    let mut rows = Vec::with_capacity(map.output_len());
    let mut consts = F2Vector::zero(map.output_len());
    for (i, p) in map.outputs().iter().enumerate() {
        let mut row = 0u64;
        for &term in p.terms() {
            if term == 0 {
                consts.set(i, true);
            } else {
                row |= term;
            }
        }
        rows.push(row);
    }
    let (x0, kernel) = F2Matrix::from_row_masks(m, rows).solve_affine(&rhs.add(&consts))?;
    Some(AffineSubspace::new(m, x0, kernel))
}

/// `∩_{c ∈ set} s_of(c)`, enumerating every point of `set` (not only a
/// generating family); `None` when the intersection is empty.
fn intersect_over_points(
    set: &AffineSubspace,
    s_of: &impl Fn(&F2Vector) -> Option<AffineSubspace>,
) -> Option<AffineSubspace> {
    let mut acc = AffineSubspace::full_space(set.ambient());
    for c in set.points() {
        acc = acc.intersect(&s_of(&c)?)?;
    }
    Some(acc)
}

/// Extends a sumset relation on `A × B` to one on a pair of affine
/// subspaces `(U, V)` with `U ⊇ A`, `V ⊇ B`.
///
/// Requires `P(a) + P(b) = P(a+b) + y` for every `a ∈ A`, `b ∈ B` (checked
/// exhaustively) and `deg P ≤ 2`. The returned pair satisfies the same
/// relation on all of `U × V` and is mutually maximal:
/// `V = ∩_{u∈U} S_u` and `U = ∩_{v∈V} S_v`.
pub fn sumset_structure_affine(
    p: &PolyMap,
    y: &F2Vector,
    a: &SupportSet,
    b: &SupportSet,
) -> Result<(AffineSubspace, AffineSubspace)> {
    let m = p.inputs();
    if p.degree() > 2 {
        return Err(Error::DegreeTooHigh { degree: p.degree(), max: 2 });
    }
    if m > MAX_STRUCTURE_VARS {
        return Err(Error::CapExceeded {
            what: "structure variables",
            requested: m as u128,
            limit: MAX_STRUCTURE_VARS as u128,
        });
    }
    if a.n() != m || b.n() != m {
        return Err(Error::InvalidInput(format!(
            "operand widths {} and {} do not match the map's {m} inputs",
            a.n(),
            b.n()
        )));
    }
    if y.len() != p.output_len() {
        return Err(Error::InvalidInput(format!(
            "shift width {} does not match the map's {} outputs",
            y.len(),
            p.output_len()
        )));
    }
    for av in a.iter() {
        for bv in b.iter() {
            if p.eval(av).add(&p.eval(bv)) != p.eval(&av.add(bv)).add(y) {
                return Err(Error::SumsetRelationViolated {
                    a: av.to_string(),
                    b: bv.to_string(),
                });
            }
        }
    }
    // Fold y into the map; the relation becomes P2(a) + P2(b) = P2(a+b).
    let p2 = p.add_output_constant(y);
    let s_of = |c: &F2Vector| -> Option<AffineSubspace> {
        affine_solution_set(&p2.directional_derivative(c), &p2.eval(c))
    };
    let points: Vec<F2Vector> = a.iter().cloned().collect();
    let mut c_side = AffineSubspace::affine_hull(&points);
    let mut rounds = 0usize;
    loop {
        let d_side = intersect_over_points(&c_side, &s_of)
            .expect("the verified relation keeps B inside every intersection");
        let c_next = intersect_over_points(&d_side, &s_of)
            .expect("the verified relation keeps A inside every intersection");
        if c_next == c_side {
            return Ok((c_side, d_side));
        }
        c_side = c_next;
        rounds += 1;
        assert!(rounds <= m + 2, "structure iteration failed to converge");
    }
}

/// Certifies that no pair of `r`-dimensional affine subspaces `(U, V)` makes
/// `(u, v) ↦ P(u) + P(v) + P(u+v)` constant on `U × V`.
///
/// Writing each output as quadratic + affine parts, the affine part cancels
/// from the triple sum, which therefore equals the bilinear polar form
/// `B(u, v)` of the quadratic part plus a constant. Constancy on
/// `(u₀ + E) × (v₀ + F)` forces `B(e, f) = 0`, `B(e, v₀) = 0` and
/// `B(u₀, f) = 0` on the direction spaces, and zero offsets satisfy the last
/// two for free — so a constant pair of dimension `r` exists exactly when
/// linear `E, F` of dimension `r` with `B(E, F) = 0` exist. The search
/// enumerates each candidate `E` by its unique echelon basis and checks
/// whether the common annihilator `W = {y : B(e, y) = 0 ∀ e ∈ E}` (a linear
/// subspace, computed as a bitset) has at least `2^r` points.
pub fn certify_no_affine_sumset(p: &PolyMap, r: usize) -> Result<bool> {
    let m = p.inputs();
    if p.degree() > 2 {
        return Err(Error::DegreeTooHigh { degree: p.degree(), max: 2 });
    }
    if m > MAX_CERTIFY_VARS {
        return Err(Error::CapExceeded {
            what: "certificate variables",
            requested: m as u128,
            limit: MAX_CERTIFY_VARS as u128,
        });
    }
    if r > MAX_CERTIFY_DIM {
        return Err(Error::CapExceeded {
            what: "certificate dimension",
            requested: r as u128,
            limit: MAX_CERTIFY_DIM as u128,
        });
    }
    if r == 0 {
        // Singleton subspaces make any value constant.
        return Ok(false);
    }
    if r > m {
        // No r-dimensional subspaces exist at all.
        return Ok(true);
    }
    let t = p.output_len();
    // adj[i][j]: variables paired with j in a quadratic term of output i.
    let mut adj = vec![vec![0u64; m]; t];
    for (i, q) in p.outputs().iter().enumerate() {
        for &term in q.terms() {
            if term.count_ones() == 2 {
                let j = term.trailing_zeros() as usize;
                let k = 63 - term.leading_zeros() as usize;
                adj[i][j] |= 1 << k;
                adj[i][k] |= 1 << j;
            }
        }
    }
    let size = 1usize << m;
    // z_table[x]: bitset of {y : B_i(x, y) = 0 for every output i}.
    let z_table: Vec<Bits256> = (0..size as u64)
        .map(|x| {
            let rows: Vec<u64> = (0..t)
                .map(|i| (0..m).filter(|&j| x >> j & 1 == 1).fold(0u64, |acc, j| acc ^ adj[i][j]))
                .collect();
            let mut bits = [0u64; 4];
            for y in 0..size as u64 {
                if rows.iter().all(|&row| (row & y).count_ones() & 1 == 0) {
                    bits_set(&mut bits, y as usize);
                }
            }
            bits
        })
        .collect();
    for basis in rref_linear_bases(m, r) {
        let mut w = z_table[basis[0] as usize];
        for &e in &basis[1..] {
            w = bits_and(&w, &z_table[e as usize]);
        }
        if bits_count(&w) as u64 >= 1 << r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Independent oracle for [`certify_no_affine_sumset`]: enumerates every pair
/// of `r`-dimensional affine subspaces directly and tests constancy of the
/// triple sum pointwise, returning the first constant pair.
pub fn find_constant_quadratic_pair(
    p: &PolyMap,
    r: usize,
) -> Result<Option<(AffineSubspace, AffineSubspace)>> {
    let m = p.inputs();
    if p.degree() > 2 {
        return Err(Error::DegreeTooHigh { degree: p.degree(), max: 2 });
    }
    if m > MAX_PAIR_SEARCH_VARS {
        return Err(Error::CapExceeded {
            what: "exhaustive pair-search variables",
            requested: m as u128,
            limit: MAX_PAIR_SEARCH_VARS as u128,
        });
    }
    if r > MAX_CERTIFY_DIM {
        return Err(Error::CapExceeded {
            what: "certificate dimension",
            requested: r as u128,
            limit: MAX_CERTIFY_DIM as u128,
        });
    }
    if r > m {
        return Ok(None);
    }
    let table = p.truth_table()?;
    let vals = table.values();
    let subspaces: Vec<(AffineSubspace, Vec<usize>)> =
        crate::impossibility::enumerate_affine_subspaces(m, r)
            .map(|u| {
                let pts: Vec<usize> = u.points().map(|q| q.index() as usize).collect();
                (u, pts)
            })
            .collect();
    for (u, upts) in &subspaces {
        'pair: for (v, vpts) in &subspaces {
            let c0 = vals[upts[0]] ^ vals[vpts[0]] ^ vals[upts[0] ^ vpts[0]];
            for &x in upts {
                for &z in vpts {
                    if vals[x] ^ vals[z] ^ vals[x ^ z] != c0 {
                        continue 'pair;
                    }
                }
            }
            return Ok(Some((u.clone(), v.clone())));
        }
    }
    Ok(None)
}

/// A sumset relation lifted to affine subspaces of the good-coordinate
/// space: `P(u) + P(v) = P(u + v + input_shift) + output_shift` for every
/// `u ∈ U`, `v ∈ V`, where `P` is the source's bad map.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SumsetAffineWitness {
    pub u: AffineSubspace,
    pub v: AffineSubspace,
    pub input_shift: F2Vector,
    pub output_shift: F2Vector,
}

impl SumsetAffineWitness {
    /// Checks the witness relation exhaustively against the source's bad map.
    pub fn relation_holds(&self, x: &NOBFSource) -> bool {
        let p = PolyMap::new(x.k(), x.bad_polys().to_vec());
        self.u.points().all(|u| {
            self.v.points().all(|v| {
                p.eval(&u).add(&p.eval(&v))
                    == p.eval(&u.add(&v).add(&self.input_shift)).add(&self.output_shift)
            })
        })
    }
}

/// Converts a sumset `A + B ⊆ support(X)` of a degree ≤ 2 source into an
/// affine-subspace relation on the good coordinates.
///
/// Shifting everything by `a₀ + b₀` (minimum elements) turns the shifted
/// source into one whose support contains the shifted `A`, `B` and their
/// sums; projecting to the good coordinates (injective on the support) turns
/// the containment into a sumset relation with shift `0` for the shifted bad
/// map, which [`sumset_structure_affine`] extends to subspaces. Shifting back
/// yields `U ⊇ good(A + b₀)`, `V ⊇ good(B + a₀)` with
/// `|U| ≥ |A|`, `|V| ≥ |B|` and the relation recorded in the witness.
pub fn sumset_witness_to_affine(
    x: &NOBFSource,
    a: &SupportSet,
    b: &SupportSet,
) -> Result<SumsetAffineWitness> {
    let n = x.n();
    let k = x.k();
    let bad_map = PolyMap::new(k, x.bad_polys().to_vec());
    if bad_map.degree() > 2 {
        return Err(Error::DegreeTooHigh { degree: bad_map.degree(), max: 2 });
    }
    if k > MAX_STRUCTURE_VARS {
        return Err(Error::CapExceeded {
            what: "structure variables",
            requested: k as u128,
            limit: MAX_STRUCTURE_VARS as u128,
        });
    }
    if a.n() != n || b.n() != n {
        return Err(Error::InvalidInput(format!(
            "operand widths {} and {} do not match the source width {n}",
            a.n(),
            b.n()
        )));
    }
    let support: HashSet<F2Vector> = x.support().into_iter().collect();
    for av in a.iter() {
        for bv in b.iter() {
            if !support.contains(&av.add(bv)) {
                return Err(Error::InvalidInput(format!(
                    "sum of {av} and {bv} lies outside the source support"
                )));
            }
        }
    }
    let a0 = *a.iter().next().expect("support sets are nonempty");
    let b0 = *b.iter().next().expect("support sets are nonempty");
    let s = a0.add(&b0);
    let good = x.good_positions();
    let bad_positions: Vec<usize> =
        (0..n).filter(|i| good.binary_search(i).is_err()).collect();
    let g = s.project(good);
    let h = s.project(&bad_positions);
    let shifted = bad_map.translate_inputs(&g).add_output_constant(&h);
    // a + a₀ and b + b₀ land in the shifted support, where good coordinates
    // determine the point; project them down.
    let a_good = SupportSet::new(k, a.iter().map(|v| v.add(&a0).project(good)))?;
    let b_good = SupportSet::new(k, b.iter().map(|v| v.add(&b0).project(good)))?;
    let (u_shifted, v_shifted) =
        sumset_structure_affine(&shifted, &F2Vector::zero(n - k), &a_good, &b_good)?;
    Ok(SumsetAffineWitness {
        u: u_shifted.translate(&g),
        v: v_shifted.translate(&g),
        input_shift: g,
        output_shift: h,
    })
}
