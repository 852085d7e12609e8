//! Multilinear polynomials and polynomial maps over GF(2).
//!
//! A monomial is a subset of variables, packed as a bit mask; a polynomial
//! is a canonical sorted set of monomials (XOR of products); a map is a
//! tuple of polynomials over a shared variable set. Truth tables are indexed
//! by `sum x_i * 2^i` and converted to and from coefficient form with the
//! subset-XOR (zeta / Moebius) transform, which is its own inverse over GF(2).

use std::collections::BTreeSet;

use rand::Rng;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::f2core::{AffineSubspace, F2Matrix, F2Vector};

/// Inputs wider than this would need gigabyte-scale truth tables.
pub const MAX_TABLE_VARS: usize = 26;

/// Anything that maps fixed-width bit vectors to fixed-width bit vectors.
pub trait BitFunction {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn apply(&self, x: &F2Vector) -> F2Vector;
}

/// A product of distinct variables; the empty product is the constant 1.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    mask: u64,
}

impl Monomial {
    pub fn new(vars: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = 0;
        for v in vars {
            assert!(v < 64, "variable index out of range");
            mask |= 1u64 << v;
        }
        Monomial { mask }
    }

    pub fn from_mask(mask: u64) -> Self {
        Monomial { mask }
    }

    pub fn constant() -> Self {
        Monomial { mask: 0 }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn vars(&self) -> Vec<usize> {
        (0..64).filter(|&i| self.mask >> i & 1 == 1).collect()
    }

    pub fn eval(&self, x: &F2Vector) -> bool {
        x.index() & self.mask == self.mask
    }
}

/// A multilinear polynomial in `m` variables, stored as the sorted set of
/// monomial masks. The representation is canonical: equal functions have
/// equal term lists. The zero polynomial has degree 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultilinearPoly {
    m: usize,
    terms: Vec<u64>,
}

impl MultilinearPoly {
    /// Builds from monomial masks; repeated masks cancel in pairs.
    pub fn new(m: usize, masks: impl IntoIterator<Item = u64>) -> Self {
        assert!(m <= 64);
        let mut set = BTreeSet::new();
        for mask in masks {
            assert!(
                m == 64 || mask < 1u64 << m,
                "monomial uses a variable outside 0..{m}"
            );
            if !set.insert(mask) {
                set.remove(&mask);
            }
        }
        MultilinearPoly {
            m,
            terms: set.into_iter().collect(),
        }
    }

    pub fn zero(m: usize) -> Self {
        MultilinearPoly { m, terms: vec![] }
    }

    pub fn one(m: usize) -> Self {
        MultilinearPoly { m, terms: vec![0] }
    }

    pub fn variable(i: usize, m: usize) -> Self {
        assert!(i < m);
        MultilinearPoly {
            m,
            terms: vec![1u64 << i],
        }
    }

    pub fn vars(&self) -> usize {
        self.m
    }

    pub fn terms(&self) -> &[u64] {
        &self.terms
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|&m| Monomial::from_mask(m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &F2Vector) -> bool {
        assert_eq!(x.len(), self.m, "evaluation point width mismatch");
        let xb = x.index();
        self.terms.iter().filter(|&&t| xb & t == t).count() & 1 == 1
    }

    /// Sum (XOR) of two polynomials over the same variables.
    pub fn add(&self, other: &MultilinearPoly) -> MultilinearPoly {
        assert_eq!(self.m, other.m, "variable count mismatch");
        MultilinearPoly::new(self.m, self.terms.iter().chain(&other.terms).copied())
    }

    pub fn add_constant(&self, c: bool) -> MultilinearPoly {
        if c {
            self.add(&MultilinearPoly::one(self.m))
        } else {
            self.clone()
        }
    }

    /// Renames variable `i` to `target[i]` inside a wider variable set.
    pub fn rename_vars(&self, target: &[usize], m_new: usize) -> MultilinearPoly {
        assert_eq!(target.len(), self.m);
        MultilinearPoly::new(
            m_new,
            self.terms.iter().map(|&t| {
                let mut mask = 0u64;
                for (i, &ti) in target.iter().enumerate() {
                    if t >> i & 1 == 1 {
                        assert!(ti < m_new);
                        mask |= 1u64 << ti;
                    }
                }
                mask
            }),
        )
    }

    /// The directional derivative `x -> p(x) + p(x + a)`, computed
    /// symbolically. Cost is `2^min(deg, |a|)` per term.
    pub fn directional_derivative(&self, a: &F2Vector) -> MultilinearPoly {
        assert_eq!(a.len(), self.m, "direction width mismatch");
        let mut acc = BTreeSet::new();
        let mut toggle = |mask: u64| {
            if !acc.insert(mask) {
                acc.remove(&mask);
            }
        };
        for &term in &self.terms {
            let hit = term & a.index();
            if hit == 0 {
                continue; // p(x) and p(x+a) contribute the same term
            }
            let base = term & !hit;
            // All proper submasks of `hit`; the full submask cancels against
            // the p(x) copy of the term.
            let mut sub = hit;
            loop {
                sub = sub.wrapping_sub(1) & hit;
                toggle(base | sub);
                if sub == 0 {
                    break;
                }
            }
        }
        let d = MultilinearPoly {
            m: self.m,
            terms: acc.into_iter().collect(),
        };
        debug_assert!(self.degree() == 0 || d.degree() < self.degree() || d.is_zero());
        d
    }

    /// Substitutes `x -> x + c`.
    pub fn translate(&self, c: &F2Vector) -> MultilinearPoly {
        assert_eq!(c.len(), self.m, "translation width mismatch");
        let mut acc = BTreeSet::new();
        let mut toggle = |mask: u64| {
            if !acc.insert(mask) {
                acc.remove(&mask);
            }
        };
        for &term in &self.terms {
            let hit = term & c.index();
            let base = term & !hit;
            let mut sub = hit;
            loop {
                toggle(base | sub);
                if sub == 0 {
                    break;
                }
                sub = sub.wrapping_sub(1) & hit;
            }
        }
        MultilinearPoly {
            m: self.m,
            terms: acc.into_iter().collect(),
        }
    }

    /// Restriction to an affine subspace, as a polynomial in the subspace's
    /// basis coordinates (in basis order).
    pub fn restrict_to_subspace(&self, u: &AffineSubspace) -> MultilinearPoly {
        assert_eq!(u.ambient(), self.m, "subspace ambient width mismatch");
        assert!(u.dim() <= MAX_TABLE_VARS);
        let values: Vec<u64> = u.points().map(|p| self.eval(&p) as u64).collect();
        let table = TruthTable::new(u.dim(), 1, values);
        let q = &table.interpolate().outputs[0];
        debug_assert!(q.degree() <= self.degree());
        q.clone()
    }

    /// Every monomial of weight <= d included independently with probability
    /// 1/2; monomials are drawn in ascending mask order.
    pub fn random(m: usize, d: usize, rng: &mut impl Rng) -> MultilinearPoly {
        assert!(m <= 64);
        let mut terms = Vec::new();
        for mask in masks_up_to_degree(m, d) {
            if rng.random::<bool>() {
                terms.push(mask);
            }
        }
        MultilinearPoly::new(m, terms)
    }
}

/// All monomial masks on `m` variables of weight <= d, ascending as integers.
pub fn masks_up_to_degree(m: usize, d: usize) -> Vec<u64> {
    assert!(m <= MAX_TABLE_VARS, "monomial enumeration capped at {MAX_TABLE_VARS} variables");
    (0..1u64 << m)
        .filter(|mask| mask.count_ones() as usize <= d)
        .collect()
}

/// A tuple of multilinear polynomials over a shared variable set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyMap {
    m: usize,
    outputs: Vec<MultilinearPoly>,
}

impl PolyMap {
    pub fn new(m: usize, outputs: Vec<MultilinearPoly>) -> Self {
        for p in &outputs {
            assert_eq!(p.vars(), m, "output over a different variable set");
        }
        PolyMap { m, outputs }
    }

    pub fn identity(m: usize) -> Self {
        PolyMap::new(m, (0..m).map(|i| MultilinearPoly::variable(i, m)).collect())
    }

    pub fn inputs(&self) -> usize {
        self.m
    }

    pub fn outputs(&self) -> &[MultilinearPoly] {
        &self.outputs
    }

    pub fn output_len(&self) -> usize {
        self.outputs.len()
    }

    pub fn degree(&self) -> usize {
        self.outputs.iter().map(MultilinearPoly::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &F2Vector) -> F2Vector {
        F2Vector::from_bits(self.outputs.iter().map(|p| p.eval(x)))
    }

    /// Adds the constant vector `c` to the map's output.
    pub fn add_output_constant(&self, c: &F2Vector) -> PolyMap {
        assert_eq!(c.len(), self.output_len(), "constant width mismatch");
        PolyMap::new(
            self.m,
            self.outputs
                .iter()
                .enumerate()
                .map(|(i, p)| p.add_constant(c.get(i)))
                .collect(),
        )
    }

    /// Substitutes `x -> x + c` in every output.
    pub fn translate_inputs(&self, c: &F2Vector) -> PolyMap {
        PolyMap::new(self.m, self.outputs.iter().map(|p| p.translate(c)).collect())
    }

    pub fn directional_derivative(&self, a: &F2Vector) -> PolyMap {
        PolyMap::new(
            self.m,
            self.outputs
                .iter()
                .map(|p| p.directional_derivative(a))
                .collect(),
        )
    }

    /// Full evaluation over all `2^m` points.
    pub fn truth_table(&self) -> Result<TruthTable> {
        if self.m > MAX_TABLE_VARS {
            return Err(Error::CapExceeded {
                what: "truth table variables",
                requested: self.m as u128,
                limit: MAX_TABLE_VARS as u128,
            });
        }
        assert!(self.output_len() <= 64);
        let size = 1usize << self.m;
        let mut buf = vec![0u64; size];
        for (j, p) in self.outputs.iter().enumerate() {
            for &t in &p.terms {
                buf[t as usize] |= 1 << j;
            }
        }
        subset_xor_transform(&mut buf);
        Ok(TruthTable {
            m: self.m,
            n: self.output_len(),
            values: buf,
        })
    }

    /// Restriction to the solution set of `L x = b`, as a map on the kernel
    /// coordinates; `Ok(None)` when the system is inconsistent.
    pub fn restrict_affine(&self, l: &F2Matrix, b: &F2Vector) -> Result<Option<PolyMap>> {
        assert_eq!(l.cols(), self.m, "constraint matrix width mismatch");
        let Some((x0, kernel)) = l.solve_affine(b) else {
            return Ok(None);
        };
        let ell = kernel.len();
        if ell > MAX_TABLE_VARS {
            return Err(Error::CapExceeded {
                what: "restriction variables",
                requested: ell as u128,
                limit: MAX_TABLE_VARS as u128,
            });
        }
        let values: Vec<u64> = (0..1u64 << ell)
            .map(|y| {
                let mut x = x0;
                for (i, k) in kernel.iter().enumerate() {
                    if y >> i & 1 == 1 {
                        x = x.add(k);
                    }
                }
                self.eval(&x).index()
            })
            .collect();
        let q = TruthTable::new(ell, self.output_len(), values).interpolate();
        debug_assert!(q.degree() <= self.degree());
        Ok(Some(q))
    }

    /// Every output drawn independently via `MultilinearPoly::random`.
    pub fn random(m: usize, n_out: usize, d: usize, rng: &mut impl Rng) -> PolyMap {
        PolyMap::new(m, (0..n_out).map(|_| MultilinearPoly::random(m, d, rng)).collect())
    }
}

impl BitFunction for PolyMap {
    fn input_len(&self) -> usize {
        self.m
    }
    fn output_len(&self) -> usize {
        self.outputs.len()
    }
    fn apply(&self, x: &F2Vector) -> F2Vector {
        self.eval(x)
    }
}

impl BitFunction for F2Matrix {
    fn input_len(&self) -> usize {
        self.cols()
    }
    fn output_len(&self) -> usize {
        self.rows()
    }
    fn apply(&self, x: &F2Vector) -> F2Vector {
        self.mul_vector(x)
    }
}

/// In-place subset-XOR transform on packed output words: entry `x` becomes
/// the XOR of all entries at submasks of `x`. Involutive over GF(2).
fn subset_xor_transform(buf: &mut [u64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let vars = n.trailing_zeros() as usize;
    for i in 0..vars {
        let half = 1usize << i;
        if n >= 1 << 16 {
            use rayon::prelude::*;
            buf.par_chunks_mut(half * 2).for_each(|chunk| {
                for k in 0..half {
                    chunk[half + k] ^= chunk[k];
                }
            });
        } else {
            for chunk in buf.chunks_mut(half * 2) {
                for k in 0..half {
                    chunk[half + k] ^= chunk[k];
                }
            }
        }
    }
}

/// A fully tabulated function on `m` input bits with `n <= 64` output bits,
/// packed one word per input point.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruthTable {
    m: usize,
    n: usize,
    values: Vec<u64>,
}

impl TruthTable {
    pub fn new(m: usize, n: usize, values: Vec<u64>) -> Self {
        assert!(m <= MAX_TABLE_VARS && n <= 64);
        assert_eq!(values.len(), 1 << m, "table must have 2^m entries");
        if n < 64 {
            assert!(
                values.iter().all(|&v| v < 1u64 << n),
                "table value exceeds output width"
            );
        }
        TruthTable { m, n, values }
    }

    pub fn from_fn(m: usize, n: usize, f: impl Fn(F2Vector) -> F2Vector) -> Self {
        let values = (0..1u64 << m)
            .map(|i| {
                let y = f(F2Vector::from_index(i, m));
                assert_eq!(y.len(), n);
                y.index()
            })
            .collect();
        TruthTable { m, n, values }
    }

    pub fn inputs(&self) -> usize {
        self.m
    }

    pub fn outputs(&self) -> usize {
        self.n
    }

    pub fn value(&self, index: u64) -> u64 {
        self.values[index as usize]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, x: &F2Vector) -> F2Vector {
        assert_eq!(x.len(), self.m);
        F2Vector::from_index(self.values[x.index() as usize], self.n)
    }

    /// Recovers the unique multilinear map with this table (Moebius
    /// inversion; the subset-XOR transform is self-inverse).
    pub fn interpolate(&self) -> PolyMap {
        let mut buf = self.values.clone();
        subset_xor_transform(&mut buf);
        let outputs = (0..self.n)
            .map(|j| {
                let terms = buf
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| *v >> j & 1 == 1)
                    .map(|(mask, _)| mask as u64);
                MultilinearPoly::new(self.m, terms)
            })
            .collect();
        PolyMap::new(self.m, outputs)
    }
}

impl BitFunction for TruthTable {
    fn input_len(&self) -> usize {
        self.m
    }
    fn output_len(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &F2Vector) -> F2Vector {
        self.get(x)
    }
}

impl Serialize for PolyMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("PolyMap", 2)?;
        s.serialize_field("m", &self.m)?;
        let outputs: Vec<Vec<Vec<usize>>> = self
            .outputs
            .iter()
            .map(|p| p.monomials().map(|mo| mo.vars()).collect())
            .collect();
        s.serialize_field("outputs", &outputs)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for PolyMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            m: usize,
            outputs: Vec<Vec<Vec<usize>>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.m > 64 {
            return Err(D::Error::custom("too many variables"));
        }
        let outputs = raw
            .outputs
            .iter()
            .map(|terms| {
                let masks = terms
                    .iter()
                    .map(|vars| {
                        let mut mask = 0u64;
                        for &v in vars {
                            if v >= raw.m {
                                return Err(D::Error::custom(format!(
                                    "variable {v} out of range for m = {}",
                                    raw.m
                                )));
                            }
                            mask |= 1 << v;
                        }
                        Ok(mask)
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(MultilinearPoly::new(raw.m, masks))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        if outputs.is_empty() {
            return Err(D::Error::custom("a map needs at least one output"));
        }
        Ok(PolyMap::new(raw.m, outputs))
    }
}
