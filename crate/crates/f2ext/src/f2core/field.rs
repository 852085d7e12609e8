use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2core::F2Vector;
use crate::polymap::{PolyMap, TruthTable};

/// Largest supported extension degree for GF(2^t).
pub const MAX_FIELD_DEGREE: usize = 32;

fn poly_deg(p: u64) -> u32 {
    debug_assert!(p != 0);
    63 - p.leading_zeros()
}

/// Remainder of carry-less division of `a` by `m` (m != 0).
fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = poly_deg(m);
    while a != 0 && poly_deg(a) >= dm {
        a ^= m << (poly_deg(a) - dm);
    }
    a
}

fn is_irreducible(p: u64, t: u32) -> bool {
    for d in 1..=t / 2 {
        for q in 1u64 << d..1u64 << (d + 1) {
            if poly_mod(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree `t`
/// over GF(2), found by exhaustive trial division. Bit `i` of the returned
/// word is the coefficient of `z^i`. Results are cached per degree.
pub fn irreducible_poly(t: usize) -> Result<u64> {
    if t == 0 || t > MAX_FIELD_DEGREE {
        return Err(Error::CapExceeded {
            what: "field degree",
            requested: t as u128,
            limit: MAX_FIELD_DEGREE as u128,
        });
    }
    static CACHE: [OnceLock<u64>; MAX_FIELD_DEGREE + 1] =
        [const { OnceLock::new() }; MAX_FIELD_DEGREE + 1];
    Ok(*CACHE[t].get_or_init(|| {
        (1u64 << t..1u64 << (t + 1))
            .find(|&p| is_irreducible(p, t as u32))
            .expect("an irreducible polynomial exists in every degree")
    }))
}

/// Carry-less product; both operands must fit in 32 bits.
fn clmul(a: u64, mut b: u64) -> u64 {
    debug_assert!(a < 1 << 32 && b < 1 << 32);
    let mut acc = 0u64;
    let mut a = a;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    acc
}

/// An element of GF(2^t) in the polynomial basis modulo `irreducible_poly(t)`.
/// Bit `i` of `rep` is the coefficient of `z^i`, matching the coordinate
/// order of `F2Vector`, so embedding a bit vector is the identity on bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct FieldElem {
    t: u8,
    rep: u64,
}

impl FieldElem {
    pub fn new(t: usize, rep: u64) -> Result<Self> {
        irreducible_poly(t)?;
        if t < 64 && rep >= 1u64 << t {
            return Err(Error::InvalidInput(format!(
                "representation {rep:#x} out of range for GF(2^{t})"
            )));
        }
        Ok(FieldElem { t: t as u8, rep })
    }

    pub fn zero(t: usize) -> Result<Self> {
        Self::new(t, 0)
    }

    pub fn one(t: usize) -> Result<Self> {
        Self::new(t, 1)
    }

    /// Embeds a bit vector of width <= t by zero-padding high coefficients.
    pub fn embed(x: &F2Vector, t: usize) -> Result<Self> {
        if x.len() > t {
            return Err(Error::InvalidInput(format!(
                "cannot embed {} bits into GF(2^{t})",
                x.len()
            )));
        }
        Self::new(t, x.index())
    }

    pub fn degree(&self) -> usize {
        self.t as usize
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    /// The low `n` coefficient bits as a vector.
    pub fn truncate(&self, n: usize) -> F2Vector {
        assert!(n <= self.t as usize);
        F2Vector::from_index(self.rep & ((1u64 << n) - 1), n)
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        assert_eq!(self.t, other.t, "field degree mismatch");
        FieldElem {
            t: self.t,
            rep: self.rep ^ other.rep,
        }
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        assert_eq!(self.t, other.t, "field degree mismatch");
        let modulus = irreducible_poly(self.t as usize).expect("degree validated at construction");
        FieldElem {
            t: self.t,
            rep: poly_mod(clmul(self.rep, other.rep), modulus),
        }
    }

    /// `self^e` by square and multiply; `x^0 = 1` including at `x = 0`.
    pub fn pow(&self, e: u64) -> FieldElem {
        let mut acc = FieldElem { t: self.t, rep: 1 };
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// Rewrites the power map `x -> x^e` on GF(2^t) as a multilinear polynomial
/// map on the t coefficient bits: evaluate on all 2^t points, then invert
/// the truth table. Each output has degree at most the Hamming weight of `e`
/// (reduced exponent), and the identification of field elements with bit
/// vectors is the identity on representations.
pub fn monomial_map_to_multilinear(e: u64, t: usize) -> Result<PolyMap> {
    if t == 0 || t > 16 {
        return Err(Error::CapExceeded {
            what: "power-map field degree",
            requested: t as u128,
            limit: 16,
        });
    }
    if e == 0 {
        return Err(Error::InvalidInput("exponent must be at least 1".into()));
    }
    let values: Vec<u64> = (0..1u64 << t)
        .map(|x| {
            FieldElem::new(t, x)
                .expect("in range by construction")
                .pow(e)
                .rep()
        })
        .collect();
    let table = TruthTable::new(t, t, values);
    let map = table.interpolate();
    // x^(2^t - 1 + r) = x^r on nonzero elements but not at 0; the degree
    // bound applies to the exponent actually evaluated.
    debug_assert!(map.degree() <= e.count_ones() as usize || e >= (1 << t));
    Ok(map)
}
