//! Sumset containment search inside a support set, exact sumset hit
//! probabilities, and the worst-case-over-flats distance bound they induce.

use std::collections::HashSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2core::F2Vector;
use crate::impossibility::SupportSet;
use crate::ratio::ExactRational;

/// Maximum size per summand set accepted by [`find_sumset_in_set`].
pub const MAX_SUMSET_PART: usize = 4;

/// Searches for sets `A`, `B` with `|A| = s_a`, `|B| = s_b` and `A + B ⊆ T`.
///
/// Any witness can be normalized by adding one of its own `B`-elements to both
/// sides, which leaves every pairwise sum unchanged while forcing `A ⊆ T` and
/// `0 ∈ B`; the search therefore only walks normalized witnesses and is still
/// complete. For each anchor `a₀ ∈ T` (in ascending order) it extends `A`
/// inside `T` depth-first, pruning on the running intersection
/// `C = ∩_{a∈A}(a + T)`, which is exactly the set of `b`-values compatible
/// with the partial `A`. The reported witness is the lexicographically
/// smallest normalized one, re-verified by direct containment.
pub fn find_sumset_in_set(
    t: &SupportSet,
    s_a: usize,
    s_b: usize,
) -> Result<Option<(Vec<F2Vector>, Vec<F2Vector>)>> {
    for (what, s) in [("sumset |A|", s_a), ("sumset |B|", s_b)] {
        if s == 0 {
            return Err(Error::InvalidInput(format!("{what} must be at least 1")));
        }
        if s > MAX_SUMSET_PART {
            return Err(Error::CapExceeded {
                what,
                requested: s as u128,
                limit: MAX_SUMSET_PART as u128,
            });
        }
    }
    t.check_size("sumset search support")?;
    let n = t.n();
    let elems = t.indices();
    let tset: HashSet<u64> = elems.iter().copied().collect();

    let witness = elems
        .par_iter()
        .enumerate()
        .filter_map(|(i, &a0)| {
            // b-values compatible with A = {a0}: all of a0 + T, ascending.
            let mut c0: Vec<u64> = elems.iter().map(|&x| x ^ a0).collect();
            c0.sort_unstable();
            let mut chosen = vec![a0];
            extend_sumset(&elems, &tset, s_a, s_b, i, &mut chosen, &c0)
        })
        .min_by(|a, b| a.0.cmp(&b.0));

    let Some((a_set, b_set)) = witness else {
        return Ok(None);
    };
    for &a in &a_set {
        for &b in &b_set {
            assert!(tset.contains(&(a ^ b)), "sumset witness failed re-verification");
        }
    }
    let to_vecs = |v: &[u64]| v.iter().map(|&x| F2Vector::from_index(x, n)).collect();
    Ok(Some((to_vecs(&a_set), to_vecs(&b_set))))
}

/// Depth-first extension of the partial `A` by strictly larger elements of
/// `T`; `c` is the sorted set of `b`-values compatible with everything chosen
/// so far. Returns the first completed witness, which DFS order makes the
/// lexicographically smallest for this anchor.
fn extend_sumset(
    elems: &[u64],
    tset: &HashSet<u64>,
    s_a: usize,
    s_b: usize,
    last_idx: usize,
    chosen: &mut Vec<u64>,
    c: &[u64],
) -> Option<(Vec<u64>, Vec<u64>)> {
    if chosen.len() == s_a {
        if c.len() < s_b {
            return None;
        }
        return Some((chosen.clone(), c[..s_b].to_vec()));
    }
    for (i, &a) in elems.iter().enumerate().skip(last_idx + 1) {
        let next: Vec<u64> = c.iter().copied().filter(|&b| tset.contains(&(b ^ a))).collect();
        if next.len() < s_b {
            continue;
        }
        chosen.push(a);
        if let Some(w) = extend_sumset(elems, tset, s_a, s_b, i, chosen, &next) {
            return Some(w);
        }
        chosen.pop();
    }
    None
}

/// The exact probability that `r + s ∈ T` for independent uniform `r ∈ R`,
/// `s ∈ S`.
pub fn sumset_hit_probability(
    t: &SupportSet,
    r: &SupportSet,
    s: &SupportSet,
) -> Result<ExactRational> {
    if r.n() != t.n() || s.n() != t.n() {
        return Err(Error::InvalidInput(format!(
            "width mismatch: target {} vs operands {} and {}",
            t.n(),
            r.n(),
            s.n()
        )));
    }
    t.check_size("hit-probability target")?;
    r.check_size("hit-probability operand")?;
    s.check_size("hit-probability operand")?;
    let tset: HashSet<u64> = t.indices().into_iter().collect();
    let s_idx = s.indices();
    let hits: u64 = r
        .indices()
        .into_iter()
        .map(|a| s_idx.iter().filter(|&&b| tset.contains(&(a ^ b))).count() as u64)
        .sum();
    Ok(ExactRational::from_u128(hits as u128, r.len() as u128 * s.len() as u128))
}

/// How the worst-case flat pair in [`distance_from_sumset_mixtures`] is
/// found: exact enumeration or a sampled estimate.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumsetBoundMode {
    /// Enumerate every pair of flats of size `2^k`; exact, capped at width 4
    /// and `k ≤ 2`.
    Exhaustive,
    /// Sample `samples` random flat pairs; the resulting `delta` is only a
    /// lower bound on the true maximum, so `bound` is only an upper bound.
    Sampled { samples: u64 },
}

/// Result of [`distance_from_sumset_mixtures`]: `bound = 1 − delta`, where
/// `delta` bounds the probability that a sum of two independent flats of
/// min-entropy `k` lands in the support.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SumsetDistanceBound {
    /// Maximum (exhaustive) or sampled maximum (estimate) hit probability.
    pub delta: ExactRational,
    /// `1 − delta`: a statistical-distance lower bound when exhaustive, an
    /// upper bound on that lower bound when sampled.
    pub bound: ExactRational,
    /// True when `delta` is the exact maximum.
    pub exhaustive: bool,
}

/// Maximizes `sumset_hit_probability(T, R, S)` over flat sources `R`, `S`
/// with min-entropy at least `k`, returning `1 − δ`.
///
/// A flat of min-entropy ≥ k is uniform on ≥ `2^k` points, and the hit
/// probability of any larger flat is an average of the hit probabilities of
/// its `2^k`-point subsets, so the maximum is attained at size exactly `2^k`
/// and the search ranges over those.
pub fn distance_from_sumset_mixtures(
    t: &SupportSet,
    k: u32,
    mode: SumsetBoundMode,
    rng: &mut impl Rng,
) -> Result<SumsetDistanceBound> {
    let n = t.n();
    t.check_size("distance-bound support")?;
    if k as usize > n {
        return Err(Error::InvalidInput(format!(
            "min-entropy {k} exceeds the {n}-bit width"
        )));
    }
    let size = 1usize << k;
    let max_count = match mode {
        SumsetBoundMode::Exhaustive => {
            if n > 4 || k > 2 {
                return Err(Error::CapExceeded {
                    what: "exhaustive flat enumeration (width, entropy)",
                    requested: n.max(k as usize) as u128,
                    limit: 4,
                });
            }
            let tmask: u32 = t.indices().iter().fold(0, |m, &x| m | 1 << x);
            let points = 1usize << n;
            let flats: Vec<Vec<usize>> = (0..points).combinations(size).collect();
            flats
                .par_iter()
                .map(|r| {
                    flats
                        .iter()
                        .map(|s| hit_count(tmask, r, s))
                        .max()
                        .expect("at least one flat of each size exists")
                })
                .max()
                .expect("at least one flat of each size exists")
        }
        SumsetBoundMode::Sampled { samples } => {
            if samples == 0 {
                return Err(Error::InvalidInput("sample count must be at least 1".into()));
            }
            if n > 26 {
                return Err(Error::CapExceeded {
                    what: "sampled flat width",
                    requested: n as u128,
                    limit: 26,
                });
            }
            let tset: HashSet<u64> = t.indices().into_iter().collect();
            let mut best = 0u64;
            for _ in 0..samples {
                let r = rand::seq::index::sample(rng, 1 << n, size);
                let s = rand::seq::index::sample(rng, 1 << n, size);
                let count: u64 = r
                    .iter()
                    .map(|a| {
                        s.iter().filter(|&b| tset.contains(&((a ^ b) as u64))).count() as u64
                    })
                    .sum();
                best = best.max(count);
            }
            best
        }
    };
    let delta = ExactRational::from_u128(max_count as u128, 1u128 << (2 * k));
    let bound = ExactRational(BigRational::from(BigInt::from(1)) - delta.0.clone());
    Ok(SumsetDistanceBound { delta, bound, exhaustive: mode == SumsetBoundMode::Exhaustive })
}

fn hit_count(tmask: u32, r: &[usize], s: &[usize]) -> u64 {
    let mut count = 0u64;
    for &a in r {
        for &b in s {
            count += (tmask >> (a ^ b) & 1) as u64;
        }
    }
    count
}
