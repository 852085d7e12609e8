//! Command-line workbench over the exact-arithmetic library: every pipeline
//! is a subcommand reading and writing versioned JSON (`"schema": "f2ext/1"`),
//! with a fixed RNG seed, a worker count, an optional wall-clock budget, and
//! stable exit codes:
//!
//! * `0` — success, including "searched and definitively found nothing"
//!   answers such as an empty sumset witness;
//! * `1` — usage, parse, or input-validation error;
//! * `2` — the time budget ran out but the run is resumable from a checkpoint;
//! * `3` — definite failure: an exhausted extractor search, a refuted
//!   verification, or a decomposition that ran out of attempts.
//!
//! Every probability or distance is emitted as an exact `"num/den"` string
//! with an adjacent float convenience field; bit vectors are strings with
//! coordinate 0 first; witness sets are sorted bitstring lists and affine
//! subspaces are `{offset, basis}` objects.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use f2ext::f2core::F2Vector;
use f2ext::impossibility::{
    certify_no_affine_sumset, find_biclique, find_sumset_in_set, is_sidon, largest_affine_in_set,
    sidon_source, sumset_structure_affine, znam_bound, BipartiteGraph, SupportSet,
};
use f2ext::polymap::PolyMap;
use f2ext::ratio::ExactRational;
use f2ext::reduction::{default_target_length, reconstruction_distance, reduce_source};
use f2ext::search::{search_extractor, verify_extractor, SearchOutcome, SearchParams, SearchReport};
use f2ext::sources::{distribution_of, DiscreteDistribution, NOBFSource};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_RESUMABLE: u8 = 2;
const EXIT_FAIL: u8 = 3;

/// Support lists longer than this are summarized by size and digest only.
const MAX_LISTED_SUPPORT: usize = 4096;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "f2ext",
    version,
    about = "Exact workbench for GF(2) polynomial sources, extractor search, and impossibility certificates"
)]
struct Cli {
    /// RNG seed for randomized subcommands; flags win over the environment.
    #[arg(long, global = true, env = "F2EXT_SEED")]
    seed: Option<u64>,

    /// Worker threads for parallel enumeration (must be at least 1).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Wall-clock budget; a search that exceeds it checkpoints and exits 2.
    #[arg(long, global = true)]
    budget_seconds: Option<u64>,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Report format: structured JSON or flattened key,value CSV.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Search checkpoint file: read when it exists, written when the budget
    /// runs out.
    #[arg(long, global = true, value_name = "FILE")]
    resume: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Scan a t-wise independent family for a member that extracts from
    /// every eligible polynomial source.
    Search(SearchArgs),
    /// Re-verify a search report through the independent slow path.
    Verify(VerifyArgs),
    /// Exact min-entropy of a map's output distribution or a distribution.
    Entropy(EntropyArgs),
    /// Exact statistical distance between two distributions.
    Distance(DistanceArgs),
    /// Decompose a polynomial source into a mixture over fewer inputs.
    Reduce(ReduceArgs),
    /// Construct the quadratic source whose support is a Sidon set.
    Sidon(SidonArgs),
    /// Inspect a source with k uniform coordinates and polynomial rest.
    Nobf(NobfArgs),
    /// Search a support set for a sumset A + B inside it.
    FindSumset(FindSumsetArgs),
    /// Find the largest affine subspace inside a support set.
    FindAffine(FindAffineArgs),
    /// Certify that no dimension-r affine pair makes a map's sumset defect
    /// constant.
    Certify(CertifyArgs),
    /// Grow a planted sumset pair into maximal affine subspaces.
    Structure(StructureArgs),
    /// Search a bipartite graph for a complete K_{s,s} subgraph.
    Biclique(BicliqueArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Load full search parameters from a JSON file instead of flags.
    #[arg(long, value_name = "FILE",
          conflicts_with_all = ["d", "ell", "n0", "k0", "r", "epsilon", "t"])]
    params: Option<PathBuf>,
    /// Degree bound of the source maps.
    #[arg(long)]
    d: Option<usize>,
    /// Number of input variables of the source maps.
    #[arg(long)]
    ell: Option<usize>,
    /// Output width of the source maps in bits.
    #[arg(long)]
    n0: Option<usize>,
    /// Entropy floor for eligible sources, as an integer or "num/den".
    #[arg(long)]
    k0: Option<String>,
    /// Extractor output width in bits.
    #[arg(long)]
    r: Option<usize>,
    /// Target statistical error, as an integer or "num/den" (default 0).
    #[arg(long)]
    epsilon: Option<String>,
    /// Independence parameter of the scanned hash family.
    #[arg(long)]
    t: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Search report JSON (a `search` envelope or a bare report).
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
}

#[derive(Args)]
struct EntropyArgs {
    /// Distribution JSON {"n","m_log","counts"} or map JSON {"m","outputs"}.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct DistanceArgs {
    /// First distribution (distribution JSON or map JSON).
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    /// Second distribution (distribution JSON or map JSON).
    #[arg(long, value_name = "FILE", conflicts_with = "uniform")]
    b: Option<PathBuf>,
    /// Compare against the uniform distribution of the same width instead.
    #[arg(long)]
    uniform: bool,
}

#[derive(Args)]
struct ReduceArgs {
    /// Polynomial map JSON whose output distribution is decomposed.
    #[arg(long, value_name = "FILE")]
    map: PathBuf,
    /// Entropy floor the input must meet; parts keep at least k − 1.
    #[arg(long)]
    k: u32,
    /// Input width of every part (default: the 7k+4 target for this k).
    #[arg(long)]
    ell_target: Option<usize>,
    /// Restriction-sampling attempts before giving up.
    #[arg(long, default_value_t = 64)]
    attempts: usize,
}

#[derive(Args)]
struct SidonArgs {
    /// Half the source width: the source has 2t coordinates, t of them good.
    #[arg(long)]
    t: usize,
}

#[derive(Args)]
struct NobfArgs {
    /// Source JSON: map JSON extended with a "good_positions" list.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args)]
struct FindSumsetArgs {
    /// Support-set JSON {"n", "elems": [bitstrings]}.
    #[arg(long, value_name = "FILE", conflicts_with = "sidon")]
    set: Option<PathBuf>,
    /// Use the Sidon source support for this t instead of a file.
    #[arg(long, value_name = "T")]
    sidon: Option<usize>,
    /// Number of elements in the left summand A.
    #[arg(long)]
    size_a: usize,
    /// Number of elements in the right summand B.
    #[arg(long)]
    size_b: usize,
}

#[derive(Args)]
struct FindAffineArgs {
    /// Support-set JSON {"n", "elems": [bitstrings]}.
    #[arg(long, value_name = "FILE", conflicts_with = "sidon")]
    set: Option<PathBuf>,
    /// Use the Sidon source support for this t instead of a file.
    #[arg(long, value_name = "T")]
    sidon: Option<usize>,
    /// Stop growing once this dimension is reached.
    #[arg(long)]
    cap_dim: usize,
}

#[derive(Args)]
struct CertifyArgs {
    /// Polynomial map JSON (degree at most 2).
    #[arg(long, value_name = "FILE")]
    map: PathBuf,
    /// Dimension of the affine pairs ruled out by the certificate.
    #[arg(long)]
    r: usize,
}

#[derive(Args)]
struct StructureArgs {
    /// Polynomial map JSON (degree at most 2).
    #[arg(long, value_name = "FILE")]
    map: PathBuf,
    /// Output-side shift as a bitstring, coordinate 0 first.
    #[arg(long)]
    y: String,
    /// Comma-separated bitstrings for the planted left set A.
    #[arg(long)]
    a: String,
    /// Comma-separated bitstrings for the planted right set B.
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct BicliqueArgs {
    /// Bipartite-graph JSON {"left","right","edges"}.
    #[arg(long, value_name = "FILE", conflicts_with = "random")]
    graph: Option<PathBuf>,
    /// Generate a seeded random graph instead: left,right,edges.
    #[arg(long, value_name = "L,R,E")]
    random: Option<String>,
    /// Side length s of the complete K_{s,s} subgraph to search for.
    #[arg(long)]
    order: usize,
}

// ---------------------------------------------------------------------------
// Run configuration and errors
// ---------------------------------------------------------------------------

/// Run-wide configuration assembled from flags and the environment.
#[derive(Clone, Debug)]
struct RunConfig {
    rng_seed: u64,
    workers: usize,
    budget_seconds: Option<u64>,
    output_path: Option<PathBuf>,
    format: Format,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        if cli.workers < 1 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        Ok(RunConfig {
            rng_seed: cli.seed.unwrap_or(0),
            workers: cli.workers,
            budget_seconds: cli.budget_seconds,
            output_path: cli.out.clone(),
            format: cli.format,
        })
    }

    fn budget(&self) -> Option<Duration> {
        self.budget_seconds.map(Duration::from_secs)
    }

    fn rng(&self) -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(self.rng_seed)
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(f2ext::Error),
    Io { path: PathBuf, source: std::io::Error },
    Json { path: PathBuf, source: serde_json::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            // A decomposition that exhausted its attempts is a definite
            // negative result, not a malformed invocation.
            CliError::Lib(f2ext::Error::ReductionFailed { .. }) => EXIT_FAIL,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Json { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl From<f2ext::Error> for CliError {
    fn from(e: f2ext::Error) -> Self {
        CliError::Lib(e)
    }
}

// ---------------------------------------------------------------------------
// Input loading and report emission
// ---------------------------------------------------------------------------

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.into(), source: e })
}

/// Loads either a distribution JSON or a polynomial map JSON (whose output
/// distribution under uniform inputs is taken), dispatching on the keys.
fn load_distribution(path: &Path) -> Result<DiscreteDistribution, CliError> {
    let value: Value = read_json(path)?;
    if value.get("counts").is_some() {
        serde_json::from_value(value).map_err(|e| CliError::Json { path: path.into(), source: e })
    } else if value.get("outputs").is_some() {
        let map: PolyMap = serde_json::from_value(value)
            .map_err(|e| CliError::Json { path: path.into(), source: e })?;
        Ok(distribution_of(&map)?)
    } else {
        Err(CliError::Usage(format!(
            "{}: expected a distribution {{\"n\",\"m_log\",\"counts\"}} or a map {{\"m\",\"outputs\"}}",
            path.display()
        )))
    }
}

/// Resolves the support-set input shared by `find-sumset` and `find-affine`.
fn load_support(set: &Option<PathBuf>, sidon: Option<usize>) -> Result<SupportSet, CliError> {
    match (set, sidon) {
        (Some(path), None) => read_json(path),
        (None, Some(t)) => Ok(SupportSet::from_vectors(sidon_source(t)?.support())?),
        _ => Err(CliError::Usage("pass exactly one of --set FILE or --sidon T".into())),
    }
}

fn parse_bits(s: &str) -> Result<F2Vector, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("bad bitstring {s:?}: {e}")))
}

fn parse_bit_list(s: &str) -> Result<Vec<F2Vector>, CliError> {
    s.split(',').map(parse_bits).collect()
}

fn parse_rational(s: &str) -> Result<ExactRational, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("bad rational {s:?}: {e}")))
}

/// Sorted canonical bitstring list of a set of vectors.
fn sorted_strings(elems: impl IntoIterator<Item = F2Vector>) -> Vec<String> {
    let mut v: Vec<F2Vector> = elems.into_iter().collect();
    v.sort();
    v.into_iter().map(|e| e.to_string()).collect()
}

/// SHA-256 over the sorted bitstring list, one element per line.
fn support_digest(sorted: &[String]) -> String {
    let mut h = Sha256::new();
    for s in sorted {
        h.update(s.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Largest integer k such that the distribution has min-entropy at least k.
fn min_entropy_floor(d: &DiscreteDistribution) -> usize {
    let mut k = 0;
    while k < d.n() && d.has_min_entropy_at_least_int(k as i64 + 1) {
        k += 1;
    }
    k
}

/// Shared entropy summary fields for a distribution.
fn entropy_fields(d: &DiscreteDistribution) -> Value {
    json!({
        "n": d.n(),
        "support_size": d.support_size(),
        "max_probability": ExactRational::from_u128(d.max_count(), d.denom()),
        "min_entropy_bits": d.min_entropy(),
        "min_entropy_floor": min_entropy_floor(d),
    })
}

/// Wraps a payload object with the schema version and the subcommand name.
fn envelope(command: &str, payload: Value) -> Value {
    let Value::Object(mut map) = payload else {
        unreachable!("every report payload is a JSON object");
    };
    map.insert("schema".into(), Value::String(f2ext::SCHEMA.into()));
    map.insert("command".into(), Value::String(command.into()));
    Value::Object(map)
}

fn merge(into: &mut Value, from: Value) {
    let (Value::Object(target), Value::Object(source)) = (into, from) else {
        unreachable!("merge operates on JSON objects");
    };
    target.extend(source);
}

fn emit(cfg: &RunConfig, report: &Value) -> Result<(), CliError> {
    let text = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(report),
    };
    match &cfg.output_path {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io { path: path.clone(), source: e })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_csv(report: &Value) -> String {
    let mut rows = Vec::new();
    flatten_json("", report, &mut rows);
    let mut out = String::from("key,value\n");
    for (key, value) in rows {
        out.push_str(&csv_field(&key));
        out.push(',');
        out.push_str(&csv_field(&value));
        out.push('\n');
    }
    out
}

/// Flattens nested JSON into `(dotted.path[index], scalar)` rows.
fn flatten_json(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_json(&key, x, rows);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                rows.push((prefix.to_string(), "[]".into()));
            } else {
                for (i, x) in items.iter().enumerate() {
                    flatten_json(&format!("{prefix}[{i}]"), x, rows);
                }
            }
        }
        Value::Null => rows.push((prefix.to_string(), String::new())),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

/// Rebuilds parameters through the validating constructor so that files
/// with internally inconsistent fields are rejected up front.
fn revalidate(params: &SearchParams) -> Result<SearchParams, CliError> {
    Ok(SearchParams::new(
        params.d(),
        params.ell(),
        params.n0(),
        params.k0().clone(),
        params.r(),
        params.epsilon().clone(),
        params.t(),
    )?)
}

fn cmd_search(
    cfg: &RunConfig,
    resume: Option<&Path>,
    args: SearchArgs,
) -> Result<(Value, u8), CliError> {
    let params = match &args.params {
        Some(path) => revalidate(&read_json::<SearchParams>(path)?)?,
        None => {
            let (Some(d), Some(ell), Some(n0), Some(k0), Some(r), Some(t)) =
                (args.d, args.ell, args.n0, args.k0.as_deref(), args.r, args.t)
            else {
                return Err(CliError::Usage(
                    "search needs either --params FILE or all of --d --ell --n0 --k0 --r --t"
                        .into(),
                ));
            };
            let epsilon = parse_rational(args.epsilon.as_deref().unwrap_or("0"))?;
            SearchParams::new(d, ell, n0, parse_rational(k0)?, r, epsilon, t)?
        }
    };
    let report = search_extractor(&params, cfg.budget(), resume)?;
    let code = match report.outcome() {
        SearchOutcome::Found | SearchOutcome::Verified => EXIT_OK,
        SearchOutcome::Budget => EXIT_RESUMABLE,
        SearchOutcome::Fail => EXIT_FAIL,
    };
    Ok((json!({ "report": report }), code))
}

fn cmd_verify(args: VerifyArgs) -> Result<(Value, u8), CliError> {
    let raw: Value = read_json(&args.report)?;
    let inner = raw.get("report").cloned().unwrap_or(raw);
    let report: SearchReport = serde_json::from_value(inner)
        .map_err(|e| CliError::Usage(format!("{}: not a search report: {e}", args.report.display())))?;
    let params = revalidate(report.params())?;
    let seed = report.found().or(report.best_seed()).ok_or_else(|| {
        CliError::Usage("the report carries no seed to verify; resume the search first".into())
    })?;
    let member = params.family().member(seed)?;
    let verified = verify_extractor(&member, &params)?;
    let confirmed = verified.worst_error() <= params.epsilon();
    let matches_original = verified.worst_error() == report.worst_error()
        && verified.eligible_source_count() == report.eligible_source_count();
    let code = if confirmed { EXIT_OK } else { EXIT_FAIL };
    let payload = json!({
        "seed": format!("{seed:x}"),
        "confirmed": confirmed,
        "matches_original": matches_original,
        "report": verified,
    });
    Ok((payload, code))
}

fn cmd_entropy(args: EntropyArgs) -> Result<(Value, u8), CliError> {
    let dist = load_distribution(&args.input)?;
    Ok((entropy_fields(&dist), EXIT_OK))
}

fn cmd_distance(args: DistanceArgs) -> Result<(Value, u8), CliError> {
    let a = load_distribution(&args.a)?;
    let (b, against) = match (&args.b, args.uniform) {
        (Some(path), false) => (load_distribution(path)?, "input"),
        (None, true) => (DiscreteDistribution::uniform(a.n())?, "uniform"),
        _ => return Err(CliError::Usage("pass exactly one of --b FILE or --uniform".into())),
    };
    if a.n() != b.n() {
        return Err(CliError::Usage(format!(
            "outcome widths differ: {} bits vs {} bits",
            a.n(),
            b.n()
        )));
    }
    let payload = json!({
        "n": a.n(),
        "against": against,
        "distance": a.statistical_distance(&b),
    });
    Ok((payload, EXIT_OK))
}

fn cmd_reduce(cfg: &RunConfig, args: ReduceArgs) -> Result<(Value, u8), CliError> {
    let map: PolyMap = read_json(&args.map)?;
    let ell_target = args.ell_target.unwrap_or_else(|| default_target_length(args.k as usize));
    let mut rng = cfg.rng();
    let result = reduce_source(&map, args.k, ell_target, &mut rng, args.attempts)?;
    let recon = reconstruction_distance(&map, result.l())?;
    let payload = json!({
        "seed": cfg.rng_seed,
        "k": args.k,
        "ell_target": ell_target,
        "attempts": args.attempts,
        "part_count": result.parts().len(),
        "reconstruction_distance": recon,
        "result": result,
    });
    Ok((payload, EXIT_OK))
}

fn cmd_sidon(args: SidonArgs) -> Result<(Value, u8), CliError> {
    let src = sidon_source(args.t)?;
    let support = sorted_strings(src.support());
    let set = SupportSet::from_vectors(src.support())?;
    let dist = src.distribution()?;
    let mut payload = json!({
        "t": args.t,
        "n": src.n(),
        "k": src.k(),
        "degree": src.source().map().degree(),
        "support_size": support.len(),
        "support": support,
        "support_digest": support_digest(&support),
        "is_sidon": is_sidon(&set)?,
        "source": src,
    });
    merge(&mut payload, entropy_fields(&dist));
    Ok((payload, EXIT_OK))
}

fn cmd_nobf(args: NobfArgs) -> Result<(Value, u8), CliError> {
    let src: NOBFSource = read_json(&args.input)?;
    let dist = src.distribution()?;
    let support = sorted_strings(src.support());
    let mut payload = json!({
        "k": src.k(),
        "good_positions": src.good_positions(),
        "degree": src.source().map().degree(),
        "support_digest": support_digest(&support),
        "variety_witness": src.variety_witness(),
    });
    if support.len() <= MAX_LISTED_SUPPORT {
        merge(&mut payload, json!({ "support": support }));
    }
    merge(&mut payload, entropy_fields(&dist));
    Ok((payload, EXIT_OK))
}

fn cmd_find_sumset(args: FindSumsetArgs) -> Result<(Value, u8), CliError> {
    let set = load_support(&args.set, args.sidon)?;
    let witness = find_sumset_in_set(&set, args.size_a, args.size_b)?;
    let payload = json!({
        "n": set.n(),
        "set_size": set.len(),
        "size_a": args.size_a,
        "size_b": args.size_b,
        "found": witness.is_some(),
        "a": witness.as_ref().map(|(a, _)| sorted_strings(a.clone())),
        "b": witness.as_ref().map(|(_, b)| sorted_strings(b.clone())),
    });
    Ok((payload, EXIT_OK))
}

fn cmd_find_affine(args: FindAffineArgs) -> Result<(Value, u8), CliError> {
    let set = load_support(&args.set, args.sidon)?;
    let (dim, witness) = largest_affine_in_set(&set, args.cap_dim)?;
    let payload = json!({
        "n": set.n(),
        "set_size": set.len(),
        "cap_dim": args.cap_dim,
        "dim": dim,
        "witness": witness,
    });
    Ok((payload, EXIT_OK))
}

fn cmd_certify(args: CertifyArgs) -> Result<(Value, u8), CliError> {
    let map: PolyMap = read_json(&args.map)?;
    let certified = certify_no_affine_sumset(&map, args.r)?;
    let payload = json!({
        "m": map.inputs(),
        "outputs": map.output_len(),
        "r": args.r,
        "certified": certified,
    });
    Ok((payload, EXIT_OK))
}

fn cmd_structure(args: StructureArgs) -> Result<(Value, u8), CliError> {
    let map: PolyMap = read_json(&args.map)?;
    let y = parse_bits(&args.y)?;
    let a = SupportSet::new(map.inputs(), parse_bit_list(&args.a)?)?;
    let b = SupportSet::new(map.inputs(), parse_bit_list(&args.b)?)?;
    let (u, v) = sumset_structure_affine(&map, &y, &a, &b)?;
    let payload = json!({
        "m": map.inputs(),
        "y": y.to_string(),
        "a": sorted_strings(a.iter().cloned()),
        "b": sorted_strings(b.iter().cloned()),
        "u_dim": u.dim(),
        "v_dim": v.dim(),
        "u": u,
        "v": v,
    });
    Ok((payload, EXIT_OK))
}

fn cmd_biclique(cfg: &RunConfig, args: BicliqueArgs) -> Result<(Value, u8), CliError> {
    let (graph, generated) = match (&args.graph, &args.random) {
        (Some(path), None) => (read_json::<BipartiteGraph>(path)?, false),
        (None, Some(spec)) => {
            let parts: Vec<&str> = spec.split(',').collect();
            let [l, r, e] = parts.as_slice() else {
                return Err(CliError::Usage(format!(
                    "bad --random {spec:?}: expected left,right,edges"
                )));
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| CliError::Usage(format!("bad --random count {s:?}: {e}")))
            };
            let mut rng = cfg.rng();
            (BipartiteGraph::random(parse(l)?, parse(r)?, parse(e)?, &mut rng)?, true)
        }
        _ => return Err(CliError::Usage("pass exactly one of --graph FILE or --random L,R,E".into())),
    };
    let witness = find_biclique(&graph, args.order)?;
    let mut payload = json!({
        "left_size": graph.left(),
        "right_size": graph.right(),
        "edge_count": graph.edge_count(),
        "order": args.order,
        "found": witness.is_some(),
        "left": witness.as_ref().map(|(l, _)| l.clone()),
        "right": witness.as_ref().map(|(_, r)| r.clone()),
    });
    if graph.left() == graph.right() {
        let bound = znam_bound(graph.left(), args.order);
        merge(
            &mut payload,
            json!({
                "znam_bound": bound,
                "exceeds_znam_bound": (graph.edge_count() as f64) > bound,
            }),
        );
    }
    if generated {
        merge(&mut payload, json!({ "seed": cfg.rng_seed, "graph": graph }));
    }
    Ok((payload, EXIT_OK))
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::from_cli(&cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))?;
    let resume = cli.resume.as_deref();
    let (command, (payload, code)) = match cli.cmd {
        Cmd::Search(args) => ("search", cmd_search(&cfg, resume, args)?),
        Cmd::Verify(args) => ("verify", cmd_verify(args)?),
        Cmd::Entropy(args) => ("entropy", cmd_entropy(args)?),
        Cmd::Distance(args) => ("distance", cmd_distance(args)?),
        Cmd::Reduce(args) => ("reduce", cmd_reduce(&cfg, args)?),
        Cmd::Sidon(args) => ("sidon", cmd_sidon(args)?),
        Cmd::Nobf(args) => ("nobf", cmd_nobf(args)?),
        Cmd::FindSumset(args) => ("find-sumset", cmd_find_sumset(args)?),
        Cmd::FindAffine(args) => ("find-affine", cmd_find_affine(args)?),
        Cmd::Certify(args) => ("certify", cmd_certify(args)?),
        Cmd::Structure(args) => ("structure", cmd_structure(args)?),
        Cmd::Biclique(args) => ("biclique", cmd_biclique(&cfg, args)?),
    };
    emit(&cfg, &envelope(command, payload))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                EXIT_OK
            } else {
                EXIT_USAGE
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
