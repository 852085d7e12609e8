//! Sidon sets sampled by quadratic sources with no oblivious bit-fixing
//! structure: the graph of the cube map over GF(2^t) is a Sidon set, and a
//! source that outputs `(y, y³)` for uniform `y` is a degree-2 source whose
//! support is exactly that graph.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::f2core::monomial_map_to_multilinear;
use crate::impossibility::SupportSet;
use crate::sources::NOBFSource;

/// Largest field degree the Sidon construction accepts.
pub const MAX_SIDON_T: usize = 12;

/// The source `(y, y³)` over GF(2^t): `t` uniform coordinates followed by
/// `t` coordinates computing the field cube, each a quadratic polynomial.
/// Its support is a Sidon set of size `2^t` and its min-entropy is exactly
/// `t` (half the output width).
pub fn sidon_source(t: usize) -> Result<NOBFSource> {
    if t == 0 {
        return Err(Error::InvalidInput("field degree must be positive".into()));
    }
    if t > MAX_SIDON_T {
        return Err(Error::CapExceeded {
            what: "sidon field degree",
            requested: t as u128,
            limit: MAX_SIDON_T as u128,
        });
    }
    let cube = monomial_map_to_multilinear(3, t)?;
    NOBFSource::new_default(2 * t, t, cube.outputs().to_vec())
}

/// Exhaustive Sidon check: no two distinct unordered pairs share a sum.
/// Equivalently, `a + b = c + d` with `a ≠ b`, `c ≠ d` forces
/// `{a, b} = {c, d}`. Two distinct pairs with equal sums can never share an
/// element (`a + b = a + d` gives `b = d`), so a single collision of pair
/// sums is exactly a violating quadruple.
pub fn is_sidon(s: &SupportSet) -> Result<bool> {
    s.check_size("sidon candidate support")?;
    let elems = s.indices();
    let mut sums: HashMap<u64, (u64, u64)> = HashMap::new();
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i + 1..] {
            if sums.insert(a ^ b, (a, b)).is_some() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
