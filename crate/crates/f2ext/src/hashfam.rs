//! t-wise independent hash families with a fixed, enumerable seed order,
//! plus the linear seeded extractors used by the leftover-hash corollary.
//!
//! A family member is the polynomial `x ↦ Σ aᵢ xⁱ` of degree `t−1` over
//! `GF(2^w)` with `w = max(n_in, r_out)`, truncated to its low `r_out` bits.
//! Coefficient `aᵢ` sits in seed bits `[i·w, (i+1)·w)`, so the seed integer
//! fixes a canonical enumeration of the family.

use std::fmt::Write as _;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::f2core::{F2Matrix, F2Vector, FieldElem, MAX_FIELD_DEGREE};
use crate::polymap::BitFunction;

/// Exhaustive verification is capped at this many seed bits.
pub const MAX_ENUMERABLE_SEED_BITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashFamily {
    n_in: usize,
    r_out: usize,
    t: usize,
    w: usize,
}

impl HashFamily {
    pub fn new(n_in: usize, r_out: usize, t: usize) -> Result<Self> {
        if n_in == 0 || r_out == 0 || t == 0 {
            return Err(Error::InvalidInput("family parameters must be positive".into()));
        }
        let w = n_in.max(r_out);
        if w > MAX_FIELD_DEGREE {
            return Err(Error::CapExceeded {
                what: "hash family field width",
                requested: w as u128,
                limit: MAX_FIELD_DEGREE as u128,
            });
        }
        if t * w > 128 {
            return Err(Error::CapExceeded {
                what: "hash family seed bits",
                requested: (t * w) as u128,
                limit: 128,
            });
        }
        Ok(HashFamily { n_in, r_out, t, w })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn r_out(&self) -> usize {
        self.r_out
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn seed_bits(&self) -> usize {
        self.t * self.w
    }

    pub fn member(&self, seed: u128) -> Result<FamilyMember> {
        FamilyMember::new(*self, seed)
    }

    /// All members in ascending seed order; requires enumerable seed space.
    pub fn members(&self) -> Result<impl Iterator<Item = FamilyMember> + '_> {
        if self.seed_bits() > MAX_ENUMERABLE_SEED_BITS {
            return Err(Error::CapExceeded {
                what: "enumerable seed bits",
                requested: self.seed_bits() as u128,
                limit: MAX_ENUMERABLE_SEED_BITS as u128,
            });
        }
        let family = *self;
        Ok((0..1u128 << self.seed_bits()).map(move |seed| FamilyMember { family, seed }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    family: HashFamily,
    seed: u128,
}

impl FamilyMember {
    pub fn new(family: HashFamily, seed: u128) -> Result<Self> {
        let bits = family.seed_bits();
        if bits < 128 && seed >> bits != 0 {
            return Err(Error::InvalidInput(format!("seed {seed} needs more than {bits} bits")));
        }
        Ok(FamilyMember { family, seed })
    }

    pub fn family(&self) -> &HashFamily {
        &self.family
    }

    pub fn seed(&self) -> u128 {
        self.seed
    }

    fn coefficient(&self, i: usize) -> FieldElem {
        let w = self.family.w;
        let mask = if w == 128 { u128::MAX } else { (1u128 << w) - 1 };
        let rep = (self.seed >> (i * w)) & mask;
        FieldElem::new(w, rep as u64).expect("w is a valid field degree")
    }

    /// Horner evaluation of `Σ aᵢ xⁱ` in `GF(2^w)`, truncated to `r_out` bits.
    pub fn eval(&self, x: &F2Vector) -> F2Vector {
        assert_eq!(x.len(), self.family.n_in, "input width mismatch");
        let w = self.family.w;
        let xe = FieldElem::embed(x, w).expect("n_in ≤ w");
        let mut acc = FieldElem::zero(w).expect("valid degree");
        for i in (0..self.family.t).rev() {
            acc = acc.mul(&xe).add(&self.coefficient(i));
        }
        acc.truncate(self.family.r_out)
    }
}

impl BitFunction for FamilyMember {
    fn input_len(&self) -> usize {
        self.family.n_in
    }

    fn output_len(&self) -> usize {
        self.family.r_out
    }

    fn apply(&self, x: &F2Vector) -> F2Vector {
        self.eval(x)
    }
}

/// True iff the joint outputs on the given distinct points are exactly
/// uniform over the whole family. The construction guarantees this for up to
/// `t` points; more points are allowed and typically fail.
pub fn verify_t_wise(family: &HashFamily, points: &[F2Vector]) -> Result<bool> {
    for (i, p) in points.iter().enumerate() {
        if p.len() != family.n_in {
            return Err(Error::InvalidInput("evaluation point width mismatch".into()));
        }
        if points[..i].contains(p) {
            return Err(Error::InvalidInput("evaluation points must be distinct".into()));
        }
    }
    if points.is_empty() {
        return Ok(true);
    }
    let tuple_bits = family.r_out * points.len();
    if tuple_bits > family.seed_bits() {
        // Fewer seeds than joint outcomes: uniformity is impossible.
        return Ok(false);
    }
    if tuple_bits > MAX_ENUMERABLE_SEED_BITS {
        return Err(Error::CapExceeded {
            what: "joint outcome bits",
            requested: tuple_bits as u128,
            limit: MAX_ENUMERABLE_SEED_BITS as u128,
        });
    }
    let mut counts = vec![0u64; 1 << tuple_bits];
    for h in family.members()? {
        let mut tuple = 0u64;
        for (j, p) in points.iter().enumerate() {
            tuple |= h.eval(p).index() << (j * family.r_out);
        }
        counts[tuple as usize] += 1;
    }
    let expected = (1u64 << family.seed_bits()) >> tuple_bits;
    Ok(counts.iter().all(|&c| c == expected))
}

/// The strong seeded extractor of the leftover-hash corollary: output `Lx`.
pub fn linear_seeded_extract(x: &F2Vector, l: &F2Matrix) -> F2Vector {
    assert_eq!(l.cols(), x.len(), "matrix width must match input");
    l.mul_vector(x)
}

/// Exhaustively checks 2-universality of the full matrix family
/// `{x ↦ Lx : L ∈ F₂^{m×n}}`: collisions `Lx = Ly` for `x ≠ y` happen with
/// probability at most `2^{−m}`, via the difference `z = x + y ≠ 0`.
pub fn verify_universality(m: usize, n: usize) -> Result<bool> {
    if m > 4 || n > 4 {
        return Err(Error::CapExceeded {
            what: "universality check dimensions",
            requested: m.max(n) as u128,
            limit: 4,
        });
    }
    let matrices = 1u64 << (m * n);
    for z in F2Vector::all(n).skip(1) {
        let mut collisions = 0u64;
        for code in 0..matrices {
            let rows = (0..m).map(|i| (code >> (i * n)) & ((1 << n) - 1)).collect();
            let l = F2Matrix::from_row_masks(n, rows);
            if l.mul_vector(&z).is_zero() {
                collisions += 1;
            }
        }
        if collisions > matrices >> m {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Independence parameter `t = ⌈2·log₂(k + class_size)⌉` used when a search
/// report suggests a family for entropy `k` against a class of sources;
/// the rounding direction is recorded in the report itself.
pub fn recommended_t(k: u128, class_size: u128) -> usize {
    let s = k + class_size;
    let bits = 128 - s.leading_zeros() as usize;
    let log2_ceil = if s.is_power_of_two() { bits - 1 } else { bits };
    2 * log2_ceil
}

#[derive(Serialize, Deserialize)]
struct MemberWire {
    n_in: usize,
    r_out: usize,
    t: usize,
    w: usize,
    seed: String,
}

impl Serialize for FamilyMember {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seed = String::new();
        write!(seed, "{:x}", self.seed).expect("infallible");
        MemberWire {
            n_in: self.family.n_in,
            r_out: self.family.r_out,
            t: self.family.t,
            w: self.family.w,
            seed,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FamilyMember {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MemberWire::deserialize(deserializer)?;
        let family = HashFamily::new(wire.n_in, wire.r_out, wire.t).map_err(D::Error::custom)?;
        if family.w != wire.w {
            return Err(D::Error::custom(format!(
                "field width {} inconsistent with max(n_in, r_out) = {}",
                wire.w, family.w
            )));
        }
        let seed = u128::from_str_radix(&wire.seed, 16)
            .map_err(|e| D::Error::custom(format!("bad seed hex: {e}")))?;
        FamilyMember::new(family, seed).map_err(D::Error::custom)
    }
}
