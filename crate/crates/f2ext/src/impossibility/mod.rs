//! Impossibility toolbox: Sidon-set sources, sumset and affine-subspace
//! containment searches, the directional-derivative structure algorithm for
//! quadratic maps, certification that a quadratic map admits no affine
//! sumset, and the worst-case→average-case sumset bounds.
//!
//! Every search in this module is exact up to its stated size caps and
//! refuses inputs beyond them; the one sampled estimator is explicitly
//! labeled as an estimate in its result type. Witnesses are deterministic:
//! ties break to the lexicographically smallest candidate in canonical bit
//! order, and every reported witness is re-verified by direct containment
//! before it is returned.

mod affine;
mod biclique;
mod sidon;
mod structure;
mod sumset;

pub use affine::{enumerate_affine_subspaces, exists_linearizing_subspace, largest_affine_in_set};
pub use biclique::{find_biclique, znam_bound, BipartiteGraph};
pub use sidon::{is_sidon, sidon_source};
pub use structure::{
    certify_no_affine_sumset, find_constant_quadratic_pair, sumset_structure_affine,
    sumset_witness_to_affine, SumsetAffineWitness,
};
pub use sumset::{
    distance_from_sumset_mixtures, find_sumset_in_set, sumset_hit_probability, SumsetBoundMode,
    SumsetDistanceBound,
};

use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::f2core::F2Vector;
use crate::polymap::MAX_TABLE_VARS;

/// Largest support any exhaustive set search accepts.
pub const MAX_SUPPORT_SIZE: usize = 1 << 12;

/// A nonempty set of same-width vectors, kept sorted in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    n: usize,
    elems: BTreeSet<F2Vector>,
}

impl SupportSet {
    pub fn new(n: usize, elems: impl IntoIterator<Item = F2Vector>) -> Result<Self> {
        let elems: BTreeSet<F2Vector> = elems.into_iter().collect();
        if elems.is_empty() {
            return Err(Error::InvalidInput("support set must be nonempty".into()));
        }
        if let Some(bad) = elems.iter().find(|e| e.len() != n) {
            return Err(Error::InvalidInput(format!(
                "element {bad} has width {}, expected {n}",
                bad.len()
            )));
        }
        Ok(SupportSet { n, elems })
    }

    /// Infers the width from the first element.
    pub fn from_vectors(elems: impl IntoIterator<Item = F2Vector>) -> Result<Self> {
        let elems: Vec<F2Vector> = elems.into_iter().collect();
        let n = elems
            .first()
            .ok_or_else(|| Error::InvalidInput("support set must be nonempty".into()))?
            .len();
        Self::new(n, elems)
    }

    /// The whole space `GF(2)^n`.
    pub fn full_space(n: usize) -> Result<Self> {
        if n > MAX_TABLE_VARS {
            return Err(Error::CapExceeded {
                what: "full-space support width",
                requested: n as u128,
                limit: MAX_TABLE_VARS as u128,
            });
        }
        Self::new(n, F2Vector::all(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the constructor rejects empty sets
    }

    pub fn contains(&self, x: &F2Vector) -> bool {
        self.elems.contains(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = &F2Vector> + '_ {
        self.elems.iter()
    }

    pub fn elems(&self) -> &BTreeSet<F2Vector> {
        &self.elems
    }

    /// Elements as packed indices, ascending.
    pub(crate) fn indices(&self) -> Vec<u64> {
        self.elems.iter().map(F2Vector::index).collect()
    }

    pub(crate) fn check_size(&self, what: &'static str) -> Result<()> {
        if self.len() > MAX_SUPPORT_SIZE {
            return Err(Error::CapExceeded {
                what,
                requested: self.len() as u128,
                limit: MAX_SUPPORT_SIZE as u128,
            });
        }
        Ok(())
    }
}

/// Fixed 256-bit set, used for neighborhoods over ≤ 256 vertices and for
/// point sets over ≤ 2^8 ambient points.
pub(crate) type Bits256 = [u64; 4];

pub(crate) fn bits_set(b: &mut Bits256, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

pub(crate) fn bits_and(a: &Bits256, b: &Bits256) -> Bits256 {
    [a[0] & b[0], a[1] & b[1], a[2] & b[2], a[3] & b[3]]
}

pub(crate) fn bits_count(a: &Bits256) -> u32 {
    a.iter().map(|w| w.count_ones()).sum()
}

/// Indices of set bits, ascending.
pub(crate) fn bits_ones(a: &Bits256) -> impl Iterator<Item = usize> + '_ {
    a.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(w * 64 + i)
        })
    })
}

#[derive(Serialize, Deserialize)]
struct SupportWire {
    n: usize,
    elems: Vec<F2Vector>,
}

impl Serialize for SupportSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SupportWire { n: self.n, elems: self.elems.iter().cloned().collect() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SupportSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = SupportWire::deserialize(deserializer)?;
        SupportSet::new(w.n, w.elems).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> F2Vector {
        s.parse().unwrap()
    }

    #[test]
    fn constructor_validates() {
        assert!(SupportSet::new(2, []).is_err());
        assert!(SupportSet::new(2, [v("011")]).is_err());
        let s = SupportSet::new(2, [v("10"), v("01"), v("10")]).unwrap();
        assert_eq!(s.len(), 2, "duplicates collapse");
        assert!(s.contains(&v("01")));
        assert!(!s.contains(&v("11")));
    }

    #[test]
    fn full_space_has_everything() {
        let s = SupportSet::full_space(3).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.indices(), (0..8).collect::<Vec<u64>>());
    }

    #[test]
    fn wire_format_is_sorted_list() {
        let s = SupportSet::new(2, [v("11"), v("00"), v("10")]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"n":2,"elems":["00","10","11"]}"#);
        let back: SupportSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SupportSet>(r#"{"n":2,"elems":[]}"#).is_err());
    }
}
