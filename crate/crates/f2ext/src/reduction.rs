//! Input reduction: decompose a polynomial source on many variables into a
//! convex combination of same-degree sources on few variables.
//!
//! A full-rank linear map `L` splits the input space into affine cosets;
//! restricting the source map to each coset yields one part per fixing
//! `b = L·x`. A fixing is *good* when the restricted source keeps
//! min-entropy at least `k − 1` (checked by the exact comparator). The
//! decomposition is exact by construction — the weighted mixture of all
//! fixings reproduces the original output distribution with statistical
//! distance zero — and the sampler retries fresh `L`'s until the good
//! fixings carry at least a `1 − 2^{−k}` fraction of the mass.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::f2core::{F2Matrix, F2Vector};
use crate::polymap::{MultilinearPoly, PolyMap};
use crate::ratio::ExactRational;
use crate::sources::{convex_mix, distribution_of, entropy_at_least, DiscreteDistribution};

/// Widest input map the exhaustive fixing enumeration accepts.
pub const MAX_REDUCTION_VARS: usize = 24;

/// Target input length `k + 4 + 3·eps_log` for error `2^{−eps_log}`.
pub fn reduction_target_length(k: usize, eps_log: usize) -> usize {
    assert!(k >= 1, "entropy parameter must be at least 1");
    k + 4 + 3 * eps_log
}

/// Target length at the default error `2^{−2k}`: `7k + 4`.
pub fn default_target_length(k: usize) -> usize {
    reduction_target_length(k, 2 * k)
}

/// The loosened headline bound `11k` (≥ `7k + 4` for every `k ≥ 1`).
pub fn stated_target_length(k: usize) -> usize {
    assert!(k >= 1, "entropy parameter must be at least 1");
    11 * k
}

/// One good fixing: the restricted map, its fixing vector, and its mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPart {
    pub b: F2Vector,
    pub weight: ExactRational,
    pub map: PolyMap,
}

/// A successful decomposition. `parts` holds only the good fixings; the
/// mass of the discarded ones is `residual_weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    l: F2Matrix,
    parts: Vec<ReductionPart>,
    residual_weight: ExactRational,
    good_fraction: ExactRational,
}

impl ReductionResult {
    pub fn l(&self) -> &F2Matrix {
        &self.l
    }

    pub fn parts(&self) -> &[ReductionPart] {
        &self.parts
    }

    pub fn residual_weight(&self) -> &ExactRational {
        &self.residual_weight
    }

    pub fn good_fraction(&self) -> &ExactRational {
        &self.good_fraction
    }
}

fn map_digest(map: &PolyMap) -> String {
    let json = serde_json::to_string(map).expect("map serialize");
    let mut h = Sha256::new();
    h.update(json.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct PartWire {
    b: F2Vector,
    weight: ExactRational,
    digest: String,
    map: PolyMap,
}

#[derive(Serialize, Deserialize)]
struct ResultWire {
    l: F2Matrix,
    parts: Vec<PartWire>,
    residual_weight: ExactRational,
    good_fraction: ExactRational,
}

impl Serialize for ReductionResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ResultWire {
            l: self.l.clone(),
            parts: self
                .parts
                .iter()
                .map(|p| PartWire {
                    b: p.b,
                    weight: p.weight.clone(),
                    digest: map_digest(&p.map),
                    map: p.map.clone(),
                })
                .collect(),
            residual_weight: self.residual_weight.clone(),
            good_fraction: self.good_fraction.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ReductionResult {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = ResultWire::deserialize(deserializer)?;
        let parts = w
            .parts
            .into_iter()
            .map(|p| {
                if map_digest(&p.map) != p.digest {
                    return Err(D::Error::custom("part digest does not match its map"));
                }
                Ok(ReductionPart { b: p.b, weight: p.weight, map: p.map })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(ReductionResult {
            l: w.l,
            parts,
            residual_weight: w.residual_weight,
            good_fraction: w.good_fraction,
        })
    }
}

/// Pads `map` with unused trailing variables up to `vars` inputs.
fn pad_inputs(map: &PolyMap, vars: usize) -> PolyMap {
    assert!(vars >= map.inputs());
    let order: Vec<usize> = (0..map.inputs()).collect();
    PolyMap::new(vars, map.outputs().iter().map(|p| p.rename_vars(&order, vars)).collect())
}

/// All fixings of `p` under `l`, in ascending fixing order, with each
/// restriction's output distribution.
fn all_fixings(p: &PolyMap, l: &F2Matrix) -> Result<Vec<(F2Vector, PolyMap, DiscreteDistribution)>> {
    let rows = l.rows();
    (0u64..1 << rows)
        .into_par_iter()
        .map(|bi| {
            let b = F2Vector::from_index(bi, rows);
            let q = p
                .restrict_affine(l, &b)?
                .expect("full-rank systems are always solvable");
            let dist = distribution_of(&q)?;
            Ok((b, q, dist))
        })
        .collect()
}

/// Decomposes `p` (with min-entropy ≥ `k`) into a mixture of sources on
/// `ell_target` inputs by sampling full-rank restrictions until at least a
/// `1 − 2^{−k}` fraction of the fixings keep min-entropy `k − 1`. The
/// mixture of all fixings is checked to reproduce `p`'s distribution
/// exactly on every successful attempt.
pub fn reduce_source(
    p: &PolyMap,
    k: u32,
    ell_target: usize,
    rng: &mut impl Rng,
    attempts: usize,
) -> Result<ReductionResult> {
    let m = p.inputs();
    if m > MAX_REDUCTION_VARS {
        return Err(Error::CapExceeded {
            what: "reduction input width",
            requested: m as u128,
            limit: MAX_REDUCTION_VARS as u128,
        });
    }
    let dist_p = distribution_of(p)?;
    if !dist_p.has_min_entropy_at_least_int(k as i64) {
        return Err(Error::EntropyTooLow { required: k.to_string() });
    }

    if m <= ell_target {
        let padded = pad_inputs(p, ell_target);
        return Ok(ReductionResult {
            l: F2Matrix::new(m, Vec::new()),
            parts: vec![ReductionPart {
                b: F2Vector::from_index(0, 0),
                weight: ExactRational::one(),
                map: padded,
            }],
            residual_weight: ExactRational::zero(),
            good_fraction: ExactRational::one(),
        });
    }

    let rows = m - ell_target;
    let fixings_total = 1u128 << rows;
    let threshold = k as i64 - 1;
    let mut best: Option<(u128, F2Matrix)> = None;

    for _ in 0..attempts {
        let l = F2Matrix::sample_full_rank(rows, m, rng)?;
        let fixings = all_fixings(p, &l)?;
        let good_count =
            fixings.iter().filter(|(_, _, d)| d.has_min_entropy_at_least_int(threshold)).count()
                as u128;
        if best.as_ref().is_none_or(|(c, _)| good_count > *c) {
            best = Some((good_count, l.clone()));
        }
        // good_count / 2^rows ≥ 1 − 2^{−k}, cleared of denominators.
        if good_count << k < (((1u128 << k) - 1) << rows) {
            continue;
        }

        let uniform_weight = ExactRational::from_u128(1, fixings_total);
        let mixture = convex_mix(
            &fixings
                .iter()
                .map(|(_, _, d)| (uniform_weight.clone(), d.clone()))
                .collect::<Vec<_>>(),
        )?;
        assert_eq!(
            mixture.statistical_distance(&dist_p),
            ExactRational::zero(),
            "fixing mixture must reproduce the source exactly"
        );

        let parts: Vec<ReductionPart> = fixings
            .into_iter()
            .filter(|(_, _, d)| d.has_min_entropy_at_least_int(threshold))
            .map(|(b, q, _)| ReductionPart { b, weight: uniform_weight.clone(), map: q })
            .collect();
        let good_fraction = ExactRational::from_u128(good_count, fixings_total);
        let residual_weight = ExactRational::from_u128(fixings_total - good_count, fixings_total);
        return Ok(ReductionResult { l, parts, residual_weight, good_fraction });
    }

    let (count, matrix) = best.expect("at least one attempt");
    Err(Error::ReductionFailed {
        best_fraction: ExactRational::from_u128(count, fixings_total).to_string(),
        best_matrix: Box::new(matrix),
        attempts,
    })
}

/// Exact statistical distance between the uniform mixture of all fixings
/// of `p` under `l` and `p`'s own output distribution (zero whenever `l`
/// has full row rank).
pub fn reconstruction_distance(p: &PolyMap, l: &F2Matrix) -> Result<ExactRational> {
    if p.inputs() > MAX_REDUCTION_VARS {
        return Err(Error::CapExceeded {
            what: "reduction input width",
            requested: p.inputs() as u128,
            limit: MAX_REDUCTION_VARS as u128,
        });
    }
    if l.rows() == 0 {
        return Ok(ExactRational::zero());
    }
    let fixings = all_fixings(p, l)?;
    let weight = ExactRational::from_u128(1, 1 << l.rows());
    let mixture = convex_mix(
        &fixings.iter().map(|(_, _, d)| (weight.clone(), d.clone())).collect::<Vec<_>>(),
    )?;
    Ok(mixture.statistical_distance(&distribution_of(p)?))
}

/// Linear form `⟨row, x⟩` as a multilinear polynomial.
fn row_polynomial(row: &F2Vector, m: usize) -> MultilinearPoly {
    MultilinearPoly::new(m, (0..m).filter(|&j| row.get(j)).map(|j| 1u64 << j))
}

fn check_prg_inputs(f: &PolyMap, l: &F2Matrix) -> Result<()> {
    if l.cols() != f.inputs() {
        return Err(Error::InvalidInput(format!(
            "matrix acts on {} variables but the map has {}",
            l.cols(),
            f.inputs()
        )));
    }
    if f.inputs() > MAX_REDUCTION_VARS {
        return Err(Error::CapExceeded {
            what: "reduction input width",
            requested: f.inputs() as u128,
            limit: MAX_REDUCTION_VARS as u128,
        });
    }
    if f.output_len() + l.rows() > 64 {
        return Err(Error::CapExceeded {
            what: "joint outcome bits",
            requested: (f.output_len() + l.rows()) as u128,
            limit: 64,
        });
    }
    Ok(())
}

/// Exact statistical distance between the joint `(f(U), L·U)` and the
/// product `(f(U), fresh uniform)` — how far `L·U` is from independent
/// randomness in the presence of `f`'s output.
pub fn verify_prg(f: &PolyMap, l: &F2Matrix) -> Result<ExactRational> {
    check_prg_inputs(f, l)?;
    let m = f.inputs();
    let rows = l.rows();
    let mut outputs: Vec<MultilinearPoly> = f.outputs().to_vec();
    for i in 0..rows {
        outputs.push(row_polynomial(&l.row(i), m));
    }
    let joint = distribution_of(&PolyMap::new(m, outputs))?;

    let dist_f = distribution_of(f)?;
    let mut product_counts = BTreeMap::new();
    for (y, &c) in dist_f.counts() {
        for bi in 0u64..1 << rows {
            let key = y.concat(&F2Vector::from_index(bi, rows));
            product_counts.insert(key, c);
        }
    }
    let product =
        DiscreteDistribution::new(f.output_len() + rows, dist_f.denom() << rows, product_counts)?;
    Ok(joint.statistical_distance(&product))
}

/// Exact probability, over a fixing `b` drawn as `L·U`, that the
/// conditional source `f(U) | L·U = b` keeps min-entropy at least `k − 1`.
pub fn verify_peg(f: &PolyMap, l: &F2Matrix, k: &ExactRational) -> Result<ExactRational> {
    check_prg_inputs(f, l)?;
    let m = f.inputs();
    let table = f.truth_table()?;
    let mut conditionals: HashMap<u64, HashMap<u64, u128>> = HashMap::new();
    for x in 0..1u64 << m {
        let b = l.mul_vector(&F2Vector::from_index(x, m)).index();
        *conditionals.entry(b).or_default().entry(table.value(x)).or_insert(0) += 1;
    }
    let threshold = ExactRational(&k.0 - BigRational::one());
    let mut good_mass: u128 = 0;
    for counts in conditionals.values() {
        let size: u128 = counts.values().sum();
        let max = *counts.values().max().expect("nonempty coset");
        if entropy_at_least(max, size, &threshold) {
            good_mass += size;
        }
    }
    Ok(ExactRational(BigRational::new(BigInt::from(good_mass), BigInt::one() << m)))
}
