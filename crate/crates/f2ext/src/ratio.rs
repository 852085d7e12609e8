//! Exact rationals on the wire: every probability or distance leaves the
//! crate as a `num/den` string plus a float convenience field.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A `BigRational` that serializes as `{"exact": "num/den", "approx": f64}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct ExactRational(pub BigRational);

impl ExactRational {
    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    pub fn from_u128(n: u128, d: u128) -> Self {
        assert!(d != 0);
        ExactRational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn approx(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for ExactRational {
    fn from(r: BigRational) -> Self {
        ExactRational(r)
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactRational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num.trim()).map_err(|e| format!("bad numerator: {e}"))?;
        let den = BigInt::from_str(den.trim()).map_err(|e| format!("bad denominator: {e}"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        if den.is_negative() {
            return Err("denominator must be positive".into());
        }
        Ok(ExactRational(BigRational::new(num, den)))
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ExactRational", 2)?;
        s.serialize_field("exact", &self.to_string())?;
        s.serialize_field("approx", &self.approx())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tagged { exact: String },
            Plain(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Tagged { exact } | Raw::Plain(exact) => {
                exact.parse().map_err(D::Error::custom)
            }
            Raw::Int(n) => Ok(ExactRational(BigRational::from_integer(n.into()))),
        }
    }
}
