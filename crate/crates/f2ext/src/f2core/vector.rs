use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Maximum width of a bit vector. Everything in this crate is desk-scale;
/// 64 coordinates cover every supported enumeration cap with room to spare.
pub const MAX_LEN: usize = 64;

/// A vector over GF(2), bit-packed. Coordinate `i` is bit `i` of `bits`,
/// so the packed word doubles as the truth-table index `sum x_i * 2^i`.
///
/// The derived `Ord` (by `len`, then by index) is the canonical order used
/// for witnesses and deterministic tie-breaking throughout the crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct F2Vector {
    len: u8,
    bits: u64,
}

impl F2Vector {
    pub fn zero(len: usize) -> Self {
        Self::from_index(0, len)
    }

    /// Builds the vector whose truth-table index is `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= MAX_LEN, "vector width {len} exceeds {MAX_LEN}");
        assert!(
            len == 64 || index < (1u64 << len),
            "index {index} out of range for width {len}"
        );
        F2Vector {
            bits: index,
            len: len as u8,
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut word = 0u64;
        let mut len = 0;
        for (i, b) in bits.into_iter().enumerate() {
            assert!(i < MAX_LEN, "vector width exceeds {MAX_LEN}");
            if b {
                word |= 1 << i;
            }
            len = i + 1;
        }
        F2Vector {
            bits: word,
            len: len as u8,
        }
    }

    /// Standard basis vector `e_i`.
    pub fn unit(i: usize, len: usize) -> Self {
        assert!(i < len);
        Self::from_index(1u64 << i, len)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// The truth-table index of this vector.
    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len());
        self.bits >> i & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len());
        if v {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &F2Vector) -> bool {
        debug_assert_eq!(self.len, other.len);
        (self.bits & other.bits).count_ones() & 1 == 1
    }

    /// `self + other`, the coordinatewise XOR.
    pub fn add(&self, other: &F2Vector) -> F2Vector {
        assert_eq!(self.len, other.len, "width mismatch in vector sum");
        F2Vector {
            bits: self.bits ^ other.bits,
            len: self.len,
        }
    }

    /// Concatenation: `self` occupies the low coordinates.
    pub fn concat(&self, other: &F2Vector) -> F2Vector {
        let len = self.len() + other.len();
        assert!(len <= MAX_LEN);
        F2Vector {
            bits: self.bits | other.bits << self.len,
            len: len as u8,
        }
    }

    /// Keeps coordinates in `coords` (ascending), reindexed to 0..coords.len().
    pub fn project(&self, coords: &[usize]) -> F2Vector {
        let mut bits = 0u64;
        for (j, &i) in coords.iter().enumerate() {
            debug_assert!(j == 0 || coords[j - 1] < i, "coords must be ascending");
            if self.get(i) {
                bits |= 1 << j;
            }
        }
        F2Vector {
            bits,
            len: coords.len() as u8,
        }
    }

    /// The low `n` coordinates.
    pub fn prefix(&self, n: usize) -> F2Vector {
        assert!(n <= self.len());
        F2Vector {
            bits: if n == 64 { self.bits } else { self.bits & ((1u64 << n) - 1) },
            len: n as u8,
        }
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    /// All `2^len` vectors of a given width, in index order.
    pub fn all(len: usize) -> impl Iterator<Item = F2Vector> {
        assert!(len < 27, "exhaustive vector enumeration capped at width 26");
        (0u64..1 << len).map(move |i| F2Vector::from_index(i, len))
    }
}

/// Bit strings are written coordinate 0 first: "1100" has x0 = x1 = 1.
impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({self})")
    }
}

impl FromStr for F2Vector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_LEN {
            return Err(format!("bit string longer than {MAX_LEN}"));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '1' => bits |= 1 << i,
                '0' => {}
                _ => return Err(format!("invalid bit character {c:?}")),
            }
        }
        Ok(F2Vector {
            bits,
            len: s.len() as u8,
        })
    }
}

impl Serialize for F2Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for F2Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
