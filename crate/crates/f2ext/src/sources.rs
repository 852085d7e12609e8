//! Exact distributions of bit-vector random variables.
//!
//! A [`DiscreteDistribution`] stores integer counts over an explicit
//! denominator, so min-entropy thresholds and statistical distances are
//! decided with integer arithmetic — floating point appears only in display
//! helpers. Distributions of polynomial maps always carry a power-of-two
//! denominator; convex mixtures may introduce general ones.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::f2core::F2Vector;
use crate::polymap::{BitFunction, MultilinearPoly, PolyMap, MAX_TABLE_VARS};
use crate::ratio::ExactRational;

/// Exact distribution on `{0,1}^n`: outcome `z` has probability
/// `counts[z] / denom`. Stored keys are exactly the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteDistribution {
    n: usize,
    denom: u128,
    counts: BTreeMap<F2Vector, u128>,
}

/// Decides whether a distribution with the given maximum count and
/// denominator has min-entropy at least `k = p/q`, purely in integers:
/// `max^q · 2^p ≤ denom^q`.
pub fn entropy_at_least(max_count: u128, denom: u128, k: &ExactRational) -> bool {
    let (p, q) = (k.0.numer(), k.0.denom());
    if q.is_one() {
        if let Some(p) = p.to_i64() {
            return scaled_count_within(max_count, denom, p);
        }
    }
    let q = q.to_u32().expect("entropy threshold denominator out of range");
    let shift = p.magnitude().to_u64().expect("entropy threshold numerator out of range");
    assert!(shift <= 1 << 20, "entropy threshold numerator out of range");
    let lhs = BigUint::from(max_count).pow(q);
    let rhs = BigUint::from(denom).pow(q);
    if p.is_negative() {
        lhs <= rhs << shift
    } else {
        lhs << shift <= rhs
    }
}

/// Decides `max · 2^p ≤ denom` without overflow (`p` may be negative).
fn scaled_count_within(max: u128, denom: u128, p: i64) -> bool {
    if p >= 0 {
        // max · 2^p ≤ denom; max ≥ 1 so any shift past 128 bits overflows.
        let p = p as u32;
        p <= max.leading_zeros() && max << p <= denom
    } else {
        // max ≤ denom · 2^{-p}; denom ≥ 1 so an overflowing shift means "yes".
        let e = (-p) as u32;
        e > denom.leading_zeros() || max <= denom << e
    }
}

impl DiscreteDistribution {
    /// Validates support keys, positive counts, and `Σ counts = denom`.
    pub fn new(n: usize, denom: u128, counts: BTreeMap<F2Vector, u128>) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidInput("distribution denominator must be positive".into()));
        }
        let mut sum: u128 = 0;
        for (z, &c) in &counts {
            if z.len() != n {
                return Err(Error::InvalidInput(format!(
                    "outcome {z} has width {}, expected {n}",
                    z.len()
                )));
            }
            if c == 0 {
                return Err(Error::InvalidInput(format!("outcome {z} has zero count")));
            }
            sum = sum.checked_add(c).ok_or(Error::Overflow)?;
        }
        if sum != denom {
            return Err(Error::InvalidInput(format!(
                "counts sum to {sum}, expected denominator {denom}"
            )));
        }
        Ok(DiscreteDistribution { n, denom, counts })
    }

    /// Counts over denominator `2^m_log`.
    pub fn from_counts_pow2(n: usize, m_log: u32, counts: BTreeMap<F2Vector, u128>) -> Result<Self> {
        if m_log >= 128 {
            return Err(Error::CapExceeded { what: "denominator log", requested: m_log as u128, limit: 127 });
        }
        Self::new(n, 1u128 << m_log, counts)
    }

    /// Uniform distribution on all of `{0,1}^n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n > MAX_TABLE_VARS {
            return Err(Error::CapExceeded {
                what: "uniform support width",
                requested: n as u128,
                limit: MAX_TABLE_VARS as u128,
            });
        }
        let counts = F2Vector::all(n).map(|z| (z, 1u128)).collect();
        Self::new(n, 1u128 << n, counts)
    }

    /// All mass on a single outcome.
    pub fn point_mass(z: F2Vector) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(z, 1);
        DiscreteDistribution { n: z.len(), denom: 1, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn denom(&self) -> u128 {
        self.denom
    }

    pub fn counts(&self) -> &BTreeMap<F2Vector, u128> {
        &self.counts
    }

    /// `log₂(denom)` when the denominator is a power of two.
    pub fn m_log(&self) -> Option<u32> {
        self.denom.is_power_of_two().then(|| self.denom.trailing_zeros())
    }

    pub fn support_size(&self) -> usize {
        self.counts.len()
    }

    pub fn max_count(&self) -> u128 {
        *self.counts.values().max().expect("nonempty support")
    }

    /// Exact probability of outcome `z` (zero off support).
    pub fn prob(&self, z: &F2Vector) -> ExactRational {
        let c = self.counts.get(z).copied().unwrap_or(0);
        ExactRational::from_u128(c, self.denom)
    }

    /// Same distribution over the smallest denominator.
    pub fn normalized(&self) -> DiscreteDistribution {
        let g = self.counts.values().fold(self.denom, |g, &c| g.gcd(&c));
        let counts = self.counts.iter().map(|(z, c)| (*z, c / g)).collect();
        DiscreteDistribution { n: self.n, denom: self.denom / g, counts }
    }

    /// `−log₂ max Pr`, for display only; decisions go through
    /// [`Self::has_min_entropy_at_least`].
    pub fn min_entropy(&self) -> f64 {
        (self.denom as f64).log2() - (self.max_count() as f64).log2()
    }

    /// Decides `H_∞ ≥ p/q` exactly: `max^q · 2^p ≤ denom^q` in integers.
    pub fn has_min_entropy_at_least(&self, k: &ExactRational) -> bool {
        entropy_at_least(self.max_count(), self.denom, k)
    }

    /// Integer-threshold convenience for [`Self::has_min_entropy_at_least`].
    pub fn has_min_entropy_at_least_int(&self, k: i64) -> bool {
        scaled_count_within(self.max_count(), self.denom, k)
    }

    /// Exact total-variation distance `½ Σ_z |Pr₁(z) − Pr₂(z)|`.
    pub fn statistical_distance(&self, other: &DiscreteDistribution) -> ExactRational {
        assert_eq!(self.n, other.n, "distance requires equal outcome widths");
        let d1 = BigUint::from(self.denom);
        let d2 = BigUint::from(other.denom);
        let l = d1.lcm(&d2);
        let s1 = &l / &d1;
        let s2 = &l / &d2;
        let mut sum = BigUint::zero();
        for (z, &c1) in &self.counts {
            let a = BigUint::from(c1) * &s1;
            let b = BigUint::from(other.counts.get(z).copied().unwrap_or(0)) * &s2;
            sum += if a >= b { a - b } else { b - a };
        }
        for (z, &c2) in &other.counts {
            if !self.counts.contains_key(z) {
                sum += BigUint::from(c2) * &s2;
            }
        }
        ExactRational(BigRational::new(BigInt::from(sum), BigInt::from(l * 2u8)))
    }

    /// Exact distance to the uniform distribution on `r` bits, computed from
    /// the support alone (off-support outcomes contribute `1/2^r` each).
    pub fn distance_to_uniform(&self, r: usize) -> ExactRational {
        assert_eq!(self.n, r, "uniform comparison requires equal outcome widths");
        let d = BigUint::from(self.denom);
        let big_r = BigUint::one() << r;
        let mut sum = BigUint::zero();
        for &c in self.counts.values() {
            let a = BigUint::from(c) * &big_r;
            sum += if a >= d { a - &d } else { &d - a };
        }
        sum += (&big_r - BigUint::from(self.counts.len() as u64)) * &d;
        ExactRational(BigRational::new(BigInt::from(sum), BigInt::from(d * big_r * 2u8)))
    }

    /// Pushforward along `f`.
    pub fn apply_function(&self, f: &impl BitFunction) -> DiscreteDistribution {
        assert_eq!(f.input_len(), self.n, "function input width mismatch");
        let mut counts: BTreeMap<F2Vector, u128> = BTreeMap::new();
        for (z, &c) in &self.counts {
            *counts.entry(f.apply(z)).or_insert(0) += c;
        }
        DiscreteDistribution { n: f.output_len(), denom: self.denom, counts }
    }

    /// Marginal on a set of coordinates; output coordinate `j` is the j-th
    /// smallest selected index.
    pub fn project(&self, coords: &[usize]) -> DiscreteDistribution {
        let mut coords = coords.to_vec();
        coords.sort_unstable();
        coords.dedup();
        assert!(coords.iter().all(|&i| i < self.n), "projection coordinate out of range");
        let mut counts: BTreeMap<F2Vector, u128> = BTreeMap::new();
        for (z, &c) in &self.counts {
            *counts.entry(z.project(&coords)).or_insert(0) += c;
        }
        DiscreteDistribution { n: coords.len(), denom: self.denom, counts }
    }

    /// Merges the two least-probable support classes while their combined
    /// mass stays ≤ `2^{−k}`, then labels the surviving classes injectively
    /// with `k+1` bits. The pushforward keeps min-entropy ≥ `k`.
    ///
    /// Ties among equal-mass classes merge the two with the smallest
    /// canonical members, so the result is deterministic.
    pub fn entropy_smooth(&self, k: u32) -> Result<(SmoothingMap, DiscreteDistribution)> {
        if k < 1 {
            return Err(Error::InvalidInput("smoothing requires an entropy target k ≥ 1".into()));
        }
        if k + 1 > 64 {
            return Err(Error::CapExceeded { what: "smoothing label width", requested: (k + 1) as u128, limit: 64 });
        }
        if !self.has_min_entropy_at_least_int(k as i64) {
            return Err(Error::EntropyTooLow { required: k.to_string() });
        }
        // Class key (count, min member) makes "least probable, smallest
        // canonical label" the BTreeMap head.
        let mut classes: BTreeMap<(u128, F2Vector), Vec<F2Vector>> =
            self.counts.iter().map(|(z, &c)| ((c, *z), vec![*z])).collect();
        while classes.len() >= 2 {
            let k1 = *classes.keys().next().expect("nonempty");
            let k2 = *classes.keys().nth(1).expect("two classes");
            // Σ counts = denom, so the sum cannot overflow.
            if !scaled_count_within(k1.0 + k2.0, self.denom, k as i64) {
                break;
            }
            let mut members = classes.remove(&k1).expect("present");
            members.extend(classes.remove(&k2).expect("present"));
            let min = *members.iter().min().expect("nonempty class");
            classes.insert((k1.0 + k2.0, min), members);
        }
        assert!(
            (classes.len() as u128) <= 1u128 << (k + 1),
            "merge loop must stop with at most 2^(k+1) classes"
        );
        let mut ordered: Vec<((u128, F2Vector), Vec<F2Vector>)> = classes.into_iter().collect();
        ordered.sort_by_key(|((_, min), _)| *min);
        let mut table = BTreeMap::new();
        let mut counts = BTreeMap::new();
        for (i, ((c, _), members)) in ordered.into_iter().enumerate() {
            let label = F2Vector::from_index(i as u64, (k + 1) as usize);
            counts.insert(label, c);
            for z in members {
                table.insert(z, label);
            }
        }
        let smoothed = DiscreteDistribution { n: (k + 1) as usize, denom: self.denom, counts };
        debug_assert!(smoothed.has_min_entropy_at_least_int(k as i64));
        Ok((SmoothingMap { n: self.n, k, table }, smoothed))
    }
}

/// Support relabeling produced by [`DiscreteDistribution::entropy_smooth`]:
/// a partial map from the original support into `{0,1}^{k+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothingMap {
    n: usize,
    k: u32,
    table: BTreeMap<F2Vector, F2Vector>,
}

impl SmoothingMap {
    pub fn input_len(&self) -> usize {
        self.n
    }

    pub fn output_len(&self) -> usize {
        (self.k + 1) as usize
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn table(&self) -> &BTreeMap<F2Vector, F2Vector> {
        &self.table
    }

    /// Label of one outcome; `None` off the support the map was built for.
    pub fn label(&self, z: &F2Vector) -> Option<F2Vector> {
        self.table.get(z).copied()
    }

    /// Pushforward of a distribution whose support the table covers.
    pub fn apply(&self, d: &DiscreteDistribution) -> Result<DiscreteDistribution> {
        assert_eq!(d.n(), self.n, "smoothing map width mismatch");
        let mut counts: BTreeMap<F2Vector, u128> = BTreeMap::new();
        for (z, &c) in d.counts() {
            let label = self.table.get(z).ok_or_else(|| {
                Error::InvalidInput(format!("outcome {z} missing from smoothing table"))
            })?;
            *counts.entry(*label).or_insert(0) += c;
        }
        DiscreteDistribution::new(self.output_len(), d.denom(), counts)
    }
}

/// Exact output distribution of `map(U_m)` by full enumeration.
pub fn distribution_of(map: &PolyMap) -> Result<DiscreteDistribution> {
    let table = map.truth_table()?;
    let n = map.output_len();
    let values = table.values();
    let merge = |mut a: HashMap<u64, u128>, b: HashMap<u64, u128>| {
        for (z, c) in b {
            *a.entry(z).or_insert(0) += c;
        }
        a
    };
    let raw: HashMap<u64, u128> = if values.len() >= 1 << 16 {
        values
            .par_chunks(1 << 14)
            .map(|chunk| {
                let mut local: HashMap<u64, u128> = HashMap::new();
                for &z in chunk {
                    *local.entry(z).or_insert(0) += 1;
                }
                local
            })
            .reduce(HashMap::new, merge)
    } else {
        let mut local: HashMap<u64, u128> = HashMap::new();
        for &z in values {
            *local.entry(z).or_insert(0) += 1;
        }
        local
    };
    let counts = raw.into_iter().map(|(z, c)| (F2Vector::from_index(z, n), c)).collect();
    DiscreteDistribution::new(n, 1u128 << map.inputs(), counts)
}

/// A polynomial map together with the degree bound it is declared at; its
/// semantics are the distribution of `map(U_m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialSource {
    map: PolyMap,
    degree_bound: usize,
}

impl PolynomialSource {
    pub fn new(map: PolyMap, degree_bound: usize) -> Result<Self> {
        if map.degree() > degree_bound {
            return Err(Error::DegreeTooHigh { degree: map.degree(), max: degree_bound });
        }
        Ok(PolynomialSource { map, degree_bound })
    }

    pub fn map(&self) -> &PolyMap {
        &self.map
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn inputs(&self) -> usize {
        self.map.inputs()
    }

    pub fn output_len(&self) -> usize {
        self.map.output_len()
    }

    pub fn distribution(&self) -> Result<DiscreteDistribution> {
        distribution_of(&self.map)
    }
}

/// Source with `k` coordinates that are independent uniform bits (the good
/// positions) while every other coordinate is a polynomial of those bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NOBFSource {
    n: usize,
    good_positions: Vec<usize>,
    bad_polys: Vec<MultilinearPoly>,
}

impl NOBFSource {
    /// `good_positions` lists the identity coordinates; `bad_polys` fills the
    /// remaining positions in ascending order, each over `k` variables.
    pub fn new(n: usize, good_positions: &[usize], bad_polys: Vec<MultilinearPoly>) -> Result<Self> {
        let mut good = good_positions.to_vec();
        good.sort_unstable();
        good.dedup();
        if good.len() != good_positions.len() {
            return Err(Error::InvalidInput("good positions must be distinct".into()));
        }
        if good.iter().any(|&i| i >= n) {
            return Err(Error::InvalidInput("good position out of range".into()));
        }
        let k = good.len();
        if bad_polys.len() != n - k {
            return Err(Error::InvalidInput(format!(
                "expected {} bad polynomials, got {}",
                n - k,
                bad_polys.len()
            )));
        }
        if bad_polys.iter().any(|p| p.vars() != k) {
            return Err(Error::InvalidInput(format!("bad polynomials must be over {k} variables")));
        }
        Ok(NOBFSource { n, good_positions: good, bad_polys })
    }

    /// Default layout: good coordinates first, then the bad ones.
    pub fn new_default(n: usize, k: usize, bad_polys: Vec<MultilinearPoly>) -> Result<Self> {
        let good: Vec<usize> = (0..k).collect();
        Self::new(n, &good, bad_polys)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.good_positions.len()
    }

    pub fn good_positions(&self) -> &[usize] {
        &self.good_positions
    }

    pub fn bad_polys(&self) -> &[MultilinearPoly] {
        &self.bad_polys
    }

    /// The sampler `P: F₂^k → F₂^n` placing the identity on good coordinates.
    pub fn source(&self) -> PolynomialSource {
        let k = self.k();
        let mut outputs = Vec::with_capacity(self.n);
        let mut bad = self.bad_polys.iter();
        for pos in 0..self.n {
            match self.good_positions.binary_search(&pos) {
                Ok(j) => outputs.push(MultilinearPoly::variable(j, k)),
                Err(_) => outputs.push(bad.next().expect("one poly per bad position").clone()),
            }
        }
        let map = PolyMap::new(k, outputs);
        let degree = map.degree().max(1);
        PolynomialSource::new(map, degree).expect("degree bound is the map degree")
    }

    /// The `n−k` polynomials `y_bad − p_i(y_good)` over the ambient `n`
    /// variables; their common zero set is exactly the support.
    pub fn variety_witness(&self) -> PolyMap {
        let mut outputs = Vec::with_capacity(self.n - self.k());
        let mut bad = self.bad_polys.iter();
        for pos in 0..self.n {
            if self.good_positions.binary_search(&pos).is_err() {
                let p = bad.next().expect("one poly per bad position");
                let lifted = p.rename_vars(&self.good_positions, self.n);
                outputs.push(lifted.add(&MultilinearPoly::variable(pos, self.n)));
            }
        }
        PolyMap::new(self.n, outputs)
    }

    /// All `2^k` outcomes in input order (they are distinct).
    pub fn support(&self) -> Vec<F2Vector> {
        let src = self.source();
        F2Vector::all(self.k()).map(|y| src.map().eval(&y)).collect()
    }

    pub fn distribution(&self) -> Result<DiscreteDistribution> {
        self.source().distribution()
    }
}

/// Builds the sampler and the variety witness for a source with `k` good
/// uniform coordinates and polynomial bad coordinates.
pub fn nobf_source(
    n: usize,
    good_positions: &[usize],
    bad_polys: Vec<MultilinearPoly>,
) -> Result<(PolynomialSource, PolyMap)> {
    let s = NOBFSource::new(n, good_positions, bad_polys)?;
    Ok((s.source(), s.variety_witness()))
}

/// Exact mixture `Σᵢ wᵢ·Dᵢ` over the least common denominator, normalized by
/// the global gcd (so dyadic inputs stay dyadic).
pub fn convex_mix(parts: &[(ExactRational, DiscreteDistribution)]) -> Result<DiscreteDistribution> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("mixture needs at least one part".into()));
    }
    let n = parts[0].1.n();
    let mut total = BigRational::zero();
    for (w, d) in parts {
        if d.n() != n {
            return Err(Error::InvalidInput("mixture parts must share outcome width".into()));
        }
        if w.0.is_negative() {
            return Err(Error::InvalidInput("mixture weights must be nonnegative".into()));
        }
        total += &w.0;
    }
    if !total.is_one() {
        return Err(Error::InvalidInput(format!("mixture weights sum to {total}, expected 1")));
    }
    let live: Vec<&(ExactRational, DiscreteDistribution)> =
        parts.iter().filter(|(w, _)| !w.0.is_zero()).collect();
    let mut l = BigUint::one();
    for (w, d) in &live {
        l = l.lcm(&(w.0.denom().magnitude() * BigUint::from(d.denom())));
    }
    let mut acc: BTreeMap<F2Vector, BigUint> = BTreeMap::new();
    for (w, d) in &live {
        let scale = &l / (w.0.denom().magnitude() * BigUint::from(d.denom())) * w.0.numer().magnitude();
        for (z, &c) in d.counts() {
            let term = BigUint::from(c) * &scale;
            acc.entry(*z).and_modify(|v| *v += &term).or_insert(term);
        }
    }
    let mut g = l.clone();
    for v in acc.values() {
        g = g.gcd(v);
    }
    let denom = (&l / &g).to_u128().ok_or(Error::Overflow)?;
    let counts = acc
        .into_iter()
        .map(|(z, v)| Ok((z, (v / &g).to_u128().ok_or(Error::Overflow)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    DiscreteDistribution::new(n, denom, counts)
}

#[derive(Serialize, Deserialize)]
struct DistributionWire {
    n: usize,
    m_log: u32,
    counts: BTreeMap<F2Vector, u64>,
}

impl Serialize for DiscreteDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let m_log = self.m_log().ok_or_else(|| {
            serde::ser::Error::custom("only power-of-two denominators serialize; mixtures may be general")
        })?;
        let counts = self
            .counts
            .iter()
            .map(|(z, &c)| {
                u64::try_from(c).map(|c| (*z, c)).map_err(|_| serde::ser::Error::custom("count exceeds u64"))
            })
            .collect::<std::result::Result<BTreeMap<_, _>, S::Error>>()?;
        DistributionWire { n: self.n, m_log, counts }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiscreteDistribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DistributionWire::deserialize(deserializer)?;
        let counts = wire.counts.into_iter().map(|(z, c)| (z, c as u128)).collect();
        DiscreteDistribution::from_counts_pow2(wire.n, wire.m_log, counts)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Wire form of an NOBF source: the full sampler map (`m` = number of good
/// bits, one output per coordinate) plus the list of good positions.
#[derive(Serialize, Deserialize)]
struct NOBFWire {
    #[serde(flatten)]
    sampler: PolyMap,
    good_positions: Vec<usize>,
}

impl Serialize for NOBFSource {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NOBFWire {
            sampler: self.source().map().clone(),
            good_positions: self.good_positions.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NOBFSource {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = NOBFWire::deserialize(deserializer)?;
        let mut sorted = wire.good_positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != wire.good_positions.len() {
            return Err(D::Error::custom("good positions must be distinct"));
        }
        let k = sorted.len();
        let n = wire.sampler.output_len();
        if wire.sampler.inputs() != k {
            return Err(D::Error::custom(format!(
                "sampler has {} inputs but {k} good positions",
                wire.sampler.inputs()
            )));
        }
        if sorted.last().is_some_and(|&p| p >= n) {
            return Err(D::Error::custom(format!("good position out of range for {n} outputs")));
        }
        let mut bad_polys = Vec::with_capacity(n - k);
        for (pos, out) in wire.sampler.outputs().iter().enumerate() {
            match sorted.binary_search(&pos) {
                Ok(j) => {
                    if *out != MultilinearPoly::variable(j, k) {
                        return Err(D::Error::custom(format!(
                            "coordinate {pos} is listed as good but is not the identity on input {j}"
                        )));
                    }
                }
                Err(_) => bad_polys.push(out.clone()),
            }
        }
        NOBFSource::new(n, &sorted, bad_polys).map_err(|e| D::Error::custom(e.to_string()))
    }
}
