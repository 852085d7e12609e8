//! Exact linear algebra over GF(2) and small binary extension fields.
//!
//! Bit conventions used everywhere in this crate: coordinate `i` of a vector
//! is bit `i` of its packed word, truth tables are indexed by
//! `sum x_i * 2^i`, and bit strings are written coordinate 0 first.

mod field;
mod matrix;
mod subspace;
pub(crate) mod vector;

pub use field::{irreducible_poly, monomial_map_to_multilinear, FieldElem, MAX_FIELD_DEGREE};
pub use matrix::F2Matrix;
pub use subspace::AffineSubspace;
pub use vector::{F2Vector, MAX_LEN};
