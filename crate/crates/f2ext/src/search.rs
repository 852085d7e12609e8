//! Exhaustive extractor search: walk a hash family in seed order and return
//! the first member that extracts from every eligible low-degree source.
//!
//! Sources with identical output distributions are deduplicated before the
//! seed loop — the extraction error depends only on the distribution — so
//! each seed is checked against one representative per distinct count
//! vector. All error comparisons are exact integer comparisons; the search
//! result is independent of the worker count because seeds are processed in
//! fixed chunks and the minimum passing seed in a chunk wins.

use std::collections::HashMap;
use std::path::Path;
use std::time::{Duration, Instant};

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::f2core::F2Vector;
use crate::hashfam::{recommended_t, FamilyMember, HashFamily};
use crate::polymap::{masks_up_to_degree, BitFunction, MultilinearPoly, PolyMap, MAX_TABLE_VARS};
use crate::ratio::ExactRational;
use crate::sources::{distribution_of, entropy_at_least};

/// Monomial budget per output coordinate.
pub const MAX_MONOMIALS_PER_OUTPUT: usize = 20;
/// Hard cap on `log₂(number of enumerated source maps)`.
pub const MAX_SOURCE_BITS: usize = 26;
/// Seeds are processed in fixed chunks so parallel runs stay deterministic.
const SEED_CHUNK: u128 = 1024;

/// Monomial masks for `ell` variables up to degree `d`, with the variable
/// cap reported as an error instead of a panic.
fn checked_masks(ell: usize, d: usize) -> Result<Vec<u64>> {
    if ell > MAX_TABLE_VARS {
        return Err(Error::CapExceeded {
            what: "source input width",
            requested: ell as u128,
            limit: MAX_TABLE_VARS as u128,
        });
    }
    Ok(masks_up_to_degree(ell, d))
}

/// Parameters of one search: source class (degree `d`, `ell` inputs, `n0`
/// outputs, entropy ≥ `k0`) against the family `(n0 → r, t)`-wise family,
/// at target error `epsilon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    d: usize,
    ell: usize,
    n0: usize,
    k0: ExactRational,
    r: usize,
    epsilon: ExactRational,
    t: usize,
    family: HashFamily,
}

impl SearchParams {
    pub fn new(
        d: usize,
        ell: usize,
        n0: usize,
        k0: ExactRational,
        r: usize,
        epsilon: ExactRational,
        t: usize,
    ) -> Result<Self> {
        if ell == 0 || n0 == 0 || r == 0 {
            return Err(Error::InvalidInput("source and output widths must be positive".into()));
        }
        if r > n0 {
            return Err(Error::InvalidInput(format!("extractor output {r} exceeds source width {n0}")));
        }
        let monomials = checked_masks(ell, d)?.len();
        if monomials > MAX_MONOMIALS_PER_OUTPUT {
            return Err(Error::CapExceeded {
                what: "monomials per output",
                requested: monomials as u128,
                limit: MAX_MONOMIALS_PER_OUTPUT as u128,
            });
        }
        if monomials * n0 > MAX_SOURCE_BITS {
            return Err(Error::CapExceeded {
                what: "source enumeration bits",
                requested: (monomials * n0) as u128,
                limit: MAX_SOURCE_BITS as u128,
            });
        }
        if epsilon.0.is_negative() {
            return Err(Error::InvalidInput("target error must be nonnegative".into()));
        }
        if epsilon.0.numer().to_u64().is_none() || epsilon.0.denom().to_u64().is_none() {
            return Err(Error::InvalidInput("target error must have 64-bit terms".into()));
        }
        let family = HashFamily::new(n0, r, t)?;
        Ok(SearchParams { d, ell, n0, k0, r, epsilon, t, family })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn k0(&self) -> &ExactRational {
        &self.k0
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn epsilon(&self) -> &ExactRational {
        &self.epsilon
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn family(&self) -> &HashFamily {
        &self.family
    }

    /// Stable digest used to pair checkpoints with their parameters.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("params serialize");
        let mut h = Sha256::new();
        h.update(json.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Number of monomial masks available to each output coordinate.
pub fn monomial_count(ell: usize, d: usize) -> Result<usize> {
    Ok(checked_masks(ell, d)?.len())
}

/// The source map encoded by `index`: output `j` contains monomial slot `s`
/// (ascending mask order) iff bit `j·M + s` of `index` is set.
pub fn source_from_index(d: usize, ell: usize, n0: usize, index: u64) -> Result<PolyMap> {
    let masks = checked_masks(ell, d)?;
    let m = masks.len();
    let outputs = (0..n0)
        .map(|j| {
            let sel = (index >> (j * m)) & ((1u64 << m) - 1);
            MultilinearPoly::new(
                ell,
                masks.iter().enumerate().filter(|(s, _)| sel >> s & 1 == 1).map(|(_, &t)| t),
            )
        })
        .collect();
    Ok(PolyMap::new(ell, outputs))
}

/// All `2^{M·n0}` degree-≤d maps in canonical monomial-bitmask order.
pub fn enumerate_sources(d: usize, ell: usize, n0: usize) -> Result<impl Iterator<Item = PolyMap>> {
    let masks = checked_masks(ell, d)?;
    let m = masks.len();
    if m > MAX_MONOMIALS_PER_OUTPUT {
        return Err(Error::CapExceeded {
            what: "monomials per output",
            requested: m as u128,
            limit: MAX_MONOMIALS_PER_OUTPUT as u128,
        });
    }
    if m * n0 > MAX_SOURCE_BITS {
        return Err(Error::CapExceeded {
            what: "source enumeration bits",
            requested: (m * n0) as u128,
            limit: MAX_SOURCE_BITS as u128,
        });
    }
    Ok((0..1u64 << (m * n0)).map(move |index| {
        let outputs = (0..n0)
            .map(|j| {
                let sel = (index >> (j * m)) & ((1u64 << m) - 1);
                MultilinearPoly::new(
                    ell,
                    masks.iter().enumerate().filter(|(s, _)| sel >> s & 1 == 1).map(|(_, &t)| t),
                )
            })
            .collect();
        PolyMap::new(ell, outputs)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOutcome {
    /// A passing seed was found; `found` holds it.
    Found,
    /// The family is exhausted; `best_seed` holds the least-error seed.
    Fail,
    /// The time budget ran out; `next_seed` resumes the scan.
    Budget,
    /// Report produced by the standalone verifier for a fixed function.
    Verified,
}

/// Result of a search or a standalone verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    params: SearchParams,
    outcome: SearchOutcome,
    examined_seeds: u64,
    found: Option<u128>,
    best_seed: Option<u128>,
    next_seed: Option<u128>,
    worst_error: ExactRational,
    worst_source: Option<PolyMap>,
    eligible_source_count: u64,
    recommended_t: usize,
}

impl SearchReport {
    pub fn params(&self) -> &SearchParams {
        &self.params
    }

    pub fn outcome(&self) -> SearchOutcome {
        self.outcome
    }

    pub fn examined_seeds(&self) -> u64 {
        self.examined_seeds
    }

    pub fn found(&self) -> Option<u128> {
        self.found
    }

    pub fn best_seed(&self) -> Option<u128> {
        self.best_seed
    }

    pub fn next_seed(&self) -> Option<u128> {
        self.next_seed
    }

    /// Exact worst extraction error of the reported seed (or verified
    /// function) over all eligible sources; zero when none are eligible.
    pub fn worst_error(&self) -> &ExactRational {
        &self.worst_error
    }

    pub fn worst_source(&self) -> Option<&PolyMap> {
        self.worst_source.as_ref()
    }

    pub fn eligible_source_count(&self) -> u64 {
        self.eligible_source_count
    }

    /// Independence parameter suggested by the enumeration lemma for this
    /// class size (log rounded up); `t` itself stays a free parameter.
    pub fn recommended_t(&self) -> usize {
        self.recommended_t
    }

    /// Whether the reported error meets the target.
    pub fn meets_target(&self) -> bool {
        self.worst_error.0 <= self.params.epsilon.0
    }

    pub fn found_member(&self) -> Option<FamilyMember> {
        self.found.map(|seed| self.params.family.member(seed).expect("seed in range"))
    }
}

#[derive(Serialize, Deserialize)]
struct ReportWire {
    params: SearchParams,
    outcome: SearchOutcome,
    examined_seeds: u64,
    found: Option<String>,
    best_seed: Option<String>,
    next_seed: Option<String>,
    worst_error: ExactRational,
    worst_source: Option<PolyMap>,
    eligible_source_count: u64,
    recommended_t: usize,
}

fn seed_hex(seed: &Option<u128>) -> Option<String> {
    seed.map(|s| format!("{s:x}"))
}

fn parse_seed_hex<E: serde::de::Error>(s: &Option<String>) -> std::result::Result<Option<u128>, E> {
    s.as_ref()
        .map(|s| u128::from_str_radix(s, 16).map_err(|e| E::custom(format!("bad seed hex: {e}"))))
        .transpose()
}

impl Serialize for SearchReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ReportWire {
            params: self.params.clone(),
            outcome: self.outcome,
            examined_seeds: self.examined_seeds,
            found: seed_hex(&self.found),
            best_seed: seed_hex(&self.best_seed),
            next_seed: seed_hex(&self.next_seed),
            worst_error: self.worst_error.clone(),
            worst_source: self.worst_source.clone(),
            eligible_source_count: self.eligible_source_count,
            recommended_t: self.recommended_t,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SearchReport {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = ReportWire::deserialize(deserializer)?;
        Ok(SearchReport {
            params: w.params,
            outcome: w.outcome,
            examined_seeds: w.examined_seeds,
            found: parse_seed_hex(&w.found)?,
            best_seed: parse_seed_hex(&w.best_seed)?,
            next_seed: parse_seed_hex(&w.next_seed)?,
            worst_error: w.worst_error,
            worst_source: w.worst_source,
            eligible_source_count: w.eligible_source_count,
            recommended_t: w.recommended_t,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    schema: String,
    params_hash: String,
    next_seed: String,
    examined_seeds: u64,
}

/// One distinct output distribution among the enumerated sources.
struct SourceGroup {
    rep_index: u64,
    counts: Vec<u64>,
}

struct GroupedSources {
    eligible: Vec<SourceGroup>,
    eligible_members: u64,
}

/// Count vector of the map at `index`: `counts[z] = |{x : P(x) = z}|`,
/// computed from per-monomial truth columns without materializing the map.
fn count_vector(mono_cols: &[Vec<u64>], index: u64, m: usize, n0: usize, ell: usize) -> Vec<u64> {
    let words = mono_cols.first().map_or(1, Vec::len);
    let mut acc = vec![0u64; n0 * words];
    for j in 0..n0 {
        let sel = (index >> (j * m)) & ((1u64 << m) - 1);
        let mut s = sel;
        while s != 0 {
            let slot = s.trailing_zeros() as usize;
            for (w, &col) in mono_cols[slot].iter().enumerate() {
                acc[j * words + w] ^= col;
            }
            s &= s - 1;
        }
    }
    let mut counts = vec![0u64; 1 << n0];
    for x in 0..1u64 << ell {
        let (w, b) = ((x / 64) as usize, x % 64);
        let mut z = 0u64;
        for j in 0..n0 {
            z |= (acc[j * words + w] >> b & 1) << j;
        }
        counts[z as usize] += 1;
    }
    counts
}

fn pack_counts(counts: &[u64], bytes_per: usize) -> Vec<u8> {
    let mut key = Vec::with_capacity(counts.len() * bytes_per);
    for &c in counts {
        key.extend_from_slice(&c.to_le_bytes()[..bytes_per]);
    }
    key
}

/// Truth column of each monomial: bit `x` of word `x/64` is its value at `x`.
fn monomial_columns(masks: &[u64], ell: usize) -> Vec<Vec<u64>> {
    let words = (1usize << ell).div_ceil(64);
    masks
        .iter()
        .map(|&mask| {
            let mut col = vec![0u64; words];
            for x in 0..1u64 << ell {
                if x & mask == mask {
                    col[(x / 64) as usize] |= 1 << (x % 64);
                }
            }
            col
        })
        .collect()
}

/// Deduplicates all enumerated sources by count vector and keeps the
/// eligible groups (min-entropy ≥ k0), ascending by representative index.
fn group_sources(params: &SearchParams) -> Result<GroupedSources> {
    let masks = checked_masks(params.ell, params.d)?;
    let m = masks.len();
    let bits = m * params.n0;
    let mono_cols = monomial_columns(&masks, params.ell);
    let bytes_per = params.ell / 8 + 1;
    let total = 1u64 << bits;

    let fold_range = |range: std::ops::Range<u64>| {
        let mut local: HashMap<Vec<u8>, (u64, u64)> = HashMap::new();
        for index in range {
            let counts = count_vector(&mono_cols, index, m, params.n0, params.ell);
            let key = pack_counts(&counts, bytes_per);
            let entry = local.entry(key).or_insert((index, 0));
            entry.1 += 1;
        }
        local
    };
    let merge = |mut a: HashMap<Vec<u8>, (u64, u64)>, b: HashMap<Vec<u8>, (u64, u64)>| {
        for (key, (rep, members)) in b {
            let entry = a.entry(key).or_insert((rep, 0));
            entry.0 = entry.0.min(rep);
            entry.1 += members;
        }
        a
    };
    let groups: HashMap<Vec<u8>, (u64, u64)> = if bits >= 16 {
        let ranges: Vec<std::ops::Range<u64>> =
            (0..total).step_by(1 << 14).map(|s| s..(s + (1 << 14)).min(total)).collect();
        ranges.into_par_iter().map(fold_range).reduce(HashMap::new, merge)
    } else {
        fold_range(0..total)
    };

    let denom = 1u128 << params.ell;
    let mut eligible: Vec<SourceGroup> = Vec::new();
    let mut eligible_members = 0u64;
    for (key, (rep_index, members)) in groups {
        let mut counts = vec![0u64; key.len() / bytes_per];
        for (i, chunk) in key.chunks(bytes_per).enumerate() {
            let mut le = [0u8; 8];
            le[..bytes_per].copy_from_slice(chunk);
            counts[i] = u64::from_le_bytes(le);
        }
        let max = *counts.iter().max().expect("nonempty counts") as u128;
        if entropy_at_least(max, denom, &params.k0) {
            eligible_members += members;
            eligible.push(SourceGroup { rep_index, counts });
        }
    }
    eligible.sort_by_key(|g| g.rep_index);
    Ok(GroupedSources { eligible, eligible_members })
}

/// Evaluation table of one family member over its whole input space.
fn member_table(member: &FamilyMember, n0: usize) -> Vec<u32> {
    (0..1u64 << n0).map(|z| member.eval(&F2Vector::from_index(z, n0)).index() as u32).collect()
}

/// Integer form of the pass test for one seed: for every eligible group,
/// `Σ_y |count_f(y)·2^r − 2^ell| · q ≤ p · 2^{ell+r+1}`, aborting a group as
/// soon as its partial sum already exceeds the bound.
fn seed_passes(
    table: &[u32],
    groups: &[SourceGroup],
    r: usize,
    ell: usize,
    eps_num: u128,
    eps_den: u128,
) -> bool {
    let rhs = eps_num << (ell + r + 1);
    let full = 1u128 << ell;
    let mut out = vec![0u64; 1 << r];
    for g in groups {
        out.iter_mut().for_each(|c| *c = 0);
        for (z, &c) in g.counts.iter().enumerate() {
            out[table[z] as usize] += c;
        }
        let mut s: u128 = 0;
        for &c in &out {
            let scaled = (c as u128) << r;
            s += scaled.abs_diff(full);
            if s * eps_den > rhs {
                return false;
            }
        }
    }
    true
}

/// Exact worst error of one member: `(S_max, arg-max representative)`, the
/// tie going to the lowest representative index.
fn exact_worst(table: &[u32], groups: &[SourceGroup], r: usize, ell: usize) -> (u128, Option<u64>) {
    let full = 1u128 << ell;
    let mut out = vec![0u64; 1 << r];
    let mut best: (u128, Option<u64>) = (0, None);
    for g in groups {
        out.iter_mut().for_each(|c| *c = 0);
        for (z, &c) in g.counts.iter().enumerate() {
            out[table[z] as usize] += c;
        }
        let s: u128 = out.iter().map(|&c| ((c as u128) << r).abs_diff(full)).sum();
        if best.1.is_none() || s > best.0 {
            best = (s, Some(g.rep_index));
        }
    }
    best
}

/// Converts the integer error sum `S = Σ_y |c_y·2^r − 2^ell|` into the
/// statistical distance `S / 2^{ell+r+1}`.
fn error_from_sum(s: u128, ell: usize, r: usize) -> ExactRational {
    let denom = num_bigint::BigInt::from(1u8) << (ell + r + 1);
    ExactRational(num_rational::BigRational::new(s.into(), denom))
}

fn ceil_k0(k0: &ExactRational) -> u128 {
    k0.0.ceil().to_integer().to_u128().unwrap_or(0)
}

/// Walks the family in seed order and returns the first member whose worst
/// error over all eligible sources meets the target. Deterministic for any
/// worker count; resumable via a checkpoint file; an exhausted family gets
/// one extra exact pass to report the least-error seed.
pub fn search_extractor(
    params: &SearchParams,
    budget: Option<Duration>,
    checkpoint: Option<&Path>,
) -> Result<SearchReport> {
    let start_time = Instant::now();
    let seed_bits = params.family.seed_bits();
    if seed_bits > 127 {
        return Err(Error::CapExceeded { what: "search seed bits", requested: seed_bits as u128, limit: 127 });
    }
    let seed_end = 1u128 << seed_bits;
    let digest = params.digest();

    let (mut next, mut examined) = (0u128, 0u64);
    if let Some(path) = checkpoint {
        if path.exists() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidInput(format!("cannot read checkpoint: {e}")))?;
            let cp: Checkpoint = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInput(format!("malformed checkpoint: {e}")))?;
            if cp.schema != crate::SCHEMA || cp.params_hash != digest {
                return Err(Error::CheckpointMismatch { found: cp.params_hash, expected: digest });
            }
            next = u128::from_str_radix(&cp.next_seed, 16)
                .map_err(|e| Error::InvalidInput(format!("bad checkpoint seed: {e}")))?;
            examined = cp.examined_seeds;
        }
    }

    let grouped = group_sources(params)?;
    let eps_num = params.epsilon.0.numer().to_u128().expect("validated at construction");
    let eps_den = params.epsilon.0.denom().to_u128().expect("validated at construction");
    let recommended = recommended_t(ceil_k0(&params.k0), grouped.eligible_members as u128);

    let base = |outcome: SearchOutcome, examined: u64| SearchReport {
        params: params.clone(),
        outcome,
        examined_seeds: examined,
        found: None,
        best_seed: None,
        next_seed: None,
        worst_error: ExactRational::zero(),
        worst_source: None,
        eligible_source_count: grouped.eligible_members,
        recommended_t: recommended,
    };

    while next < seed_end {
        if let Some(limit) = budget {
            if start_time.elapsed() >= limit {
                if let Some(path) = checkpoint {
                    let cp = Checkpoint {
                        schema: crate::SCHEMA.into(),
                        params_hash: digest.clone(),
                        next_seed: format!("{next:x}"),
                        examined_seeds: examined,
                    };
                    std::fs::write(path, serde_json::to_string_pretty(&cp).expect("serialize"))
                        .map_err(|e| Error::InvalidInput(format!("cannot write checkpoint: {e}")))?;
                }
                let mut report = base(SearchOutcome::Budget, examined);
                report.next_seed = Some(next);
                return Ok(report);
            }
        }
        let chunk_end = (next + SEED_CHUNK).min(seed_end);
        let hit = (next..chunk_end)
            .into_par_iter()
            .filter(|&seed| {
                let member = params.family.member(seed).expect("seed in range");
                let table = member_table(&member, params.n0);
                seed_passes(&table, &grouped.eligible, params.r, params.ell, eps_num, eps_den)
            })
            .min();
        examined += (chunk_end - next) as u64;
        if let Some(seed) = hit {
            let member = params.family.member(seed)?;
            let table = member_table(&member, params.n0);
            let (s, rep) = exact_worst(&table, &grouped.eligible, params.r, params.ell);
            let mut report = base(SearchOutcome::Found, examined);
            report.found = Some(seed);
            report.worst_error = error_from_sum(s, params.ell, params.r);
            report.worst_source = rep
                .map(|i| source_from_index(params.d, params.ell, params.n0, i))
                .transpose()?;
            return Ok(report);
        }
        next = chunk_end;
    }

    // Family exhausted: one exact pass (no early abort) to report the seed
    // with the least worst error, ties to the lowest seed.
    let best = (0..seed_end)
        .into_par_iter()
        .map(|seed| {
            let member = params.family.member(seed).expect("seed in range");
            let table = member_table(&member, params.n0);
            let (s, rep) = exact_worst(&table, &grouped.eligible, params.r, params.ell);
            (s, seed, rep)
        })
        .min_by_key(|&(s, seed, _)| (s, seed));
    let mut report = base(SearchOutcome::Fail, examined);
    if let Some((s, seed, rep)) = best {
        report.best_seed = Some(seed);
        report.worst_error = error_from_sum(s, params.ell, params.r);
        report.worst_source =
            rep.map(|i| source_from_index(params.d, params.ell, params.n0, i)).transpose()?;
    }
    Ok(report)
}

/// Independent verifier: recomputes every eligible source's distribution
/// through the generic probability engine (no count-vector sharing, no
/// early abort) and reports the exact worst error of `f`.
pub fn verify_extractor(f: &impl BitFunction, params: &SearchParams) -> Result<SearchReport> {
    if f.input_len() != params.n0 || f.output_len() != params.r {
        return Err(Error::InvalidInput("function shape does not match the search parameters".into()));
    }
    let mut eligible = 0u64;
    let mut worst: Option<(ExactRational, PolyMap)> = None;
    for map in enumerate_sources(params.d, params.ell, params.n0)? {
        let dist = distribution_of(&map)?;
        if !dist.has_min_entropy_at_least(&params.k0) {
            continue;
        }
        eligible += 1;
        let err = dist.apply_function(f).distance_to_uniform(params.r);
        if worst.as_ref().is_none_or(|(w, _)| err.0 > w.0) {
            worst = Some((err, map));
        }
    }
    let (worst_error, worst_source) = match worst {
        Some((e, s)) => (e, Some(s)),
        None => (ExactRational::zero(), None),
    };
    Ok(SearchReport {
        params: params.clone(),
        outcome: SearchOutcome::Verified,
        examined_seeds: 0,
        found: None,
        best_seed: None,
        next_seed: None,
        worst_error,
        worst_source,
        eligible_source_count: eligible,
        recommended_t: recommended_t(ceil_k0(&params.k0), eligible as u128),
    })
}

/// Extractor for wide inputs: apply `f` to the first `n0` coordinates.
#[derive(Clone, Debug)]
pub struct ComposedExtractor<F: BitFunction> {
    f: F,
    n: usize,
}

impl<F: BitFunction> BitFunction for ComposedExtractor<F> {
    fn input_len(&self) -> usize {
        self.n
    }

    fn output_len(&self) -> usize {
        self.f.output_len()
    }

    fn apply(&self, x: &F2Vector) -> F2Vector {
        self.f.apply(&x.prefix(self.f.input_len()))
    }
}

/// Composes the found member with a prefix projection: `Ext(x) = f(x[..n0])`.
pub fn compose_final_extractor<F: BitFunction>(f: F, n: usize, n0: usize) -> Result<ComposedExtractor<F>> {
    if f.input_len() != n0 {
        return Err(Error::InvalidInput(format!(
            "prefix width {n0} does not match function input {}",
            f.input_len()
        )));
    }
    if n0 > n {
        return Err(Error::InvalidInput(format!("prefix width {n0} exceeds total width {n}")));
    }
    Ok(ComposedExtractor { f, n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymap::TruthTable;
    use crate::sources::NOBFSource;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn params(
        d: usize,
        ell: usize,
        n0: usize,
        k0: &str,
        r: usize,
        eps: &str,
        t: usize,
    ) -> SearchParams {
        SearchParams::new(
            d,
            ell,
            n0,
            k0.parse().unwrap(),
            r,
            eps.parse().unwrap(),
            t,
        )
        .unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_sources(1, 2, 1).unwrap().count(), 8);
        assert_eq!(enumerate_sources(0, 3, 2).unwrap().count(), 4);
        let all: Vec<PolyMap> = enumerate_sources(2, 2, 1).unwrap().collect();
        assert_eq!(all.len(), 16);
        let distinct: BTreeSet<String> =
            all.iter().map(|p| serde_json::to_string(p).unwrap()).collect();
        assert_eq!(distinct.len(), 16, "no repeated maps");
    }

    #[test]
    fn index_encoding_is_canonical() {
        // Monomial order for ell=2, d=1 is [1, x0, x1]; index bits select
        // per-output monomials in slots of width 3.
        let map = source_from_index(1, 2, 2, 0b001_110).unwrap();
        assert_eq!(map.outputs()[0].terms(), &[0b01, 0b10]); // x0 + x1
        assert_eq!(map.outputs()[1].terms(), &[0b00]); // constant 1
    }

    #[test]
    fn grouping_matches_direct_distributions() {
        let p = params(2, 3, 2, "1", 1, "0", 2);
        let grouped = group_sources(&p).unwrap();
        let mut eligible_direct = 0u64;
        for map in enumerate_sources(2, 3, 2).unwrap() {
            let d = distribution_of(&map).unwrap();
            if d.has_min_entropy_at_least(&"1".parse().unwrap()) {
                eligible_direct += 1;
            }
        }
        assert_eq!(grouped.eligible_members, eligible_direct);
        for g in &grouped.eligible {
            let map = source_from_index(2, 3, 2, g.rep_index).unwrap();
            let d = distribution_of(&map).unwrap();
            for (z, &c) in d.counts() {
                assert_eq!(g.counts[z.index() as usize] as u128, c);
            }
        }
    }

    #[test]
    fn vacuous_threshold_passes_at_seed_zero() {
        let p = params(1, 2, 2, "5", 1, "0", 2);
        let report = search_extractor(&p, None, None).unwrap();
        assert_eq!(report.outcome(), SearchOutcome::Found);
        assert_eq!(report.found(), Some(0));
        assert_eq!(report.eligible_source_count(), 0);
        assert_eq!(report.worst_error(), &ExactRational::zero());
    }

    #[test]
    fn affine_bijections_and_balanced_functions() {
        // d=1, ell=n0=2, k0=2: eligible sources are the 24 affine bijections.
        let p = params(1, 2, 2, "2", 1, "0", 2);
        let report = search_extractor(&p, None, None).unwrap();
        assert_eq!(report.eligible_source_count(), 24);
        assert_eq!(report.outcome(), SearchOutcome::Found);
        let member = report.found_member().unwrap();
        // Independent verification through the generic engine.
        let verify = verify_extractor(&member, &p).unwrap();
        assert_eq!(verify.eligible_source_count(), 24);
        assert_eq!(verify.worst_error(), &ExactRational::zero());

        // Any balanced table is perfect on a uniform-on-image source.
        let parity = TruthTable::new(2, 1, vec![0, 1, 1, 0]);
        let v = verify_extractor(&parity, &p).unwrap();
        assert_eq!(v.worst_error(), &ExactRational::zero());
    }

    #[test]
    fn constant_function_has_half_error() {
        let p = params(1, 2, 2, "2", 1, "1/2", 2);
        let constant = TruthTable::new(2, 1, vec![0, 0, 0, 0]);
        let v = verify_extractor(&constant, &p).unwrap();
        assert_eq!(v.worst_error(), &ExactRational::from_u128(1, 2));
        assert!(v.meets_target());
    }

    #[test]
    fn impossible_target_exhausts_family() {
        // Rank-1 affine sources (entropy 1) cannot look uniform on 2 bits:
        // every member fails, and the exact pass reports error ≥ 1/2.
        let p = params(1, 2, 2, "1", 2, "1/8", 2);
        let report = search_extractor(&p, None, None).unwrap();
        assert_eq!(report.outcome(), SearchOutcome::Fail);
        assert!(report.found().is_none());
        assert!(report.best_seed().is_some());
        assert_eq!(report.examined_seeds(), 16);
        assert!(report.worst_error().0 >= ExactRational::from_u128(1, 2).0);
        assert!(report.worst_source().is_some());
    }

    #[test]
    fn relaxation_is_monotone() {
        let strict = params(1, 2, 2, "1", 1, "1/4", 2);
        let base = search_extractor(&strict, None, None).unwrap();
        let looser_eps = params(1, 2, 2, "1", 1, "1/2", 2);
        let higher_k = params(1, 2, 2, "2", 1, "1/4", 2);
        if base.outcome() == SearchOutcome::Found {
            for relaxed in [looser_eps, higher_k] {
                let r = search_extractor(&relaxed, None, None).unwrap();
                assert_eq!(r.outcome(), SearchOutcome::Found, "relaxation flipped a pass");
                assert!(r.found().unwrap() <= base.found().unwrap());
            }
        }
    }

    #[test]
    fn search_is_deterministic_across_worker_counts() {
        let p = params(2, 3, 3, "3", 1, "1/4", 2);
        let mut outputs = Vec::new();
        for workers in [1usize, 4] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().unwrap();
            let report = pool.install(|| search_extractor(&p, None, None)).unwrap();
            outputs.push(serde_json::to_string(&report).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "reports differ across worker counts");
    }

    #[test]
    fn budget_and_resume_round_trip() {
        let dir = std::env::temp_dir().join(format!("f2ext-search-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cp = dir.join("checkpoint.json");
        let _ = std::fs::remove_file(&cp);

        let p = params(2, 3, 3, "3", 1, "1/4", 2);
        let paused = search_extractor(&p, Some(Duration::ZERO), Some(&cp)).unwrap();
        assert_eq!(paused.outcome(), SearchOutcome::Budget);
        assert_eq!(paused.next_seed(), Some(0));
        assert!(cp.exists());

        let resumed = search_extractor(&p, None, Some(&cp)).unwrap();
        let fresh = search_extractor(&p, None, None).unwrap();
        assert_eq!(
            serde_json::to_string(&resumed).unwrap(),
            serde_json::to_string(&fresh).unwrap(),
            "resume must reproduce the uninterrupted run"
        );

        // A checkpoint from different parameters is rejected.
        let other = params(1, 2, 2, "1", 1, "1/4", 2);
        let clash = search_extractor(&other, None, Some(&cp));
        assert!(matches!(clash, Err(Error::CheckpointMismatch { .. })));
        std::fs::remove_file(&cp).unwrap();
    }

    #[test]
    fn found_seed_confirmed_by_independent_verifier() {
        let p = params(1, 3, 3, "3", 1, "0", 2);
        let report = search_extractor(&p, None, None).unwrap();
        assert_eq!(report.outcome(), SearchOutcome::Found);
        let member = report.found_member().unwrap();
        let v = verify_extractor(&member, &p).unwrap();
        assert!(v.worst_error().0 <= p.epsilon().0);
        assert_eq!(v.eligible_source_count(), 1344, "affine bijections of F2^3");
    }

    #[test]
    fn composition_prefixes_the_input() {
        let fam = HashFamily::new(2, 1, 2).unwrap();
        let h = fam.member(0b0110).unwrap();
        let same = compose_final_extractor(h, 2, 2).unwrap();
        for x in F2Vector::all(2) {
            assert_eq!(same.apply(&x), h.eval(&x));
        }
        let wide = compose_final_extractor(h, 5, 2).unwrap();
        for x in F2Vector::all(5) {
            assert_eq!(wide.apply(&x), h.eval(&x.prefix(2)));
        }
        assert!(compose_final_extractor(h, 1, 2).is_err());
    }

    #[test]
    fn prefix_keeps_most_entropy_on_good_coordinate_sources() {
        // Sources with k good coordinates lose at most the entropy gap
        // g = n − k when projected to a prefix: H(prefix) ≥ n0 − g.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let n = rng.random_range(3..=5usize);
            let k = rng.random_range(2..n);
            let g = n - k;
            let n0 = rng.random_range(g.max(1)..=n);
            let bad: Vec<MultilinearPoly> =
                (0..g).map(|_| MultilinearPoly::random(k, 2, &mut rng)).collect();
            let src = NOBFSource::new_default(n, k, bad).unwrap();
            let dist = src.distribution().unwrap();
            let prefix = dist.project(&(0..n0).collect::<Vec<_>>());
            assert!(
                prefix.has_min_entropy_at_least_int((n0 as i64) - (g as i64)),
                "prefix entropy fell below n0 − g"
            );
        }
    }

    #[test]
    fn constant_member_composes_to_constant() {
        let fam = HashFamily::new(2, 1, 2).unwrap();
        let h = fam.member(0).unwrap();
        let ext = compose_final_extractor(h, 4, 2).unwrap();
        let outs: BTreeSet<F2Vector> = F2Vector::all(4).map(|x| ext.apply(&x)).collect();
        assert_eq!(outs.len(), 1);
    }

    #[test]
    fn report_wire_format_round_trips() {
        let p = params(1, 2, 2, "2", 1, "0", 2);
        let report = search_extractor(&p, None, None).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: SearchReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v["found"].is_string());
        assert_eq!(v["outcome"], "found");
    }

    #[test]
    fn digest_tracks_parameters() {
        let a = params(1, 2, 2, "2", 1, "0", 2);
        let b = params(1, 2, 2, "2", 1, "1/2", 2);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest(), a.clone().digest());
    }
}
