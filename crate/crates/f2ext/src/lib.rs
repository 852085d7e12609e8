//! Exact, desk-scale workbench for seedless extraction from low-degree
//! polynomial sources over GF(2).
//!
//! The crate provides bit-packed GF(2) linear algebra ([`f2core`]),
//! multilinear polynomial maps ([`polymap`]), exact probability oracles for
//! min-entropy and statistical distance ([`sources`]), t-wise independent
//! hash families ([`hashfam`]), an exhaustive extractor search over all
//! low-degree sources ([`search`]), the deterministic input-length reduction
//! pipeline ([`reduction`]), and the structure/impossibility toolbox for
//! sumsets of polynomial images ([`impossibility`]).
//!
//! Every probability that feeds a decision is an exact rational; floats only
//! ever appear in reports. All randomized routines take explicit seeds and
//! their outputs are independent of worker count.

pub mod error;
pub mod f2core;
pub mod guide;
pub mod hashfam;
pub mod impossibility;
pub mod polymap;
pub mod ratio;
pub mod reduction;
pub mod search;
pub mod sources;

pub use error::{Error, Result};

/// Version tag carried by every JSON document the crate emits.
pub const SCHEMA: &str = "f2ext/1";
