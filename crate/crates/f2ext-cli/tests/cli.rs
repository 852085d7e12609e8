//! End-to-end tests of the `f2ext` binary: exit codes, JSON envelopes,
//! round-trips between subcommands, determinism across seeds and worker
//! counts, and the CSV emission path.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_f2ext"));
    // Keep tests hermetic even when the ambient environment sets a seed.
    c.env_remove("F2EXT_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

/// Runs the binary, asserts the exit code, parses stdout as JSON, and checks
/// the envelope plus the re-parse invariant (serialize → parse is identity).
fn run_json(args: &[&str], command: &str, code: i32) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "args {args:?}: stderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).expect("stdout is UTF-8");
    let value: Value = serde_json::from_str(&text).expect("stdout is JSON");
    assert_eq!(value["schema"], "f2ext/1");
    assert_eq!(value["command"], command);
    let reparsed: Value =
        serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(reparsed, value, "emitted JSON must re-parse to an equal value");
    value
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("f2ext-cli-tests");
    fs::create_dir_all(&dir).expect("scratch dir");
    dir.join(name)
}

fn write_file(name: &str, text: &str) -> PathBuf {
    let path = scratch(name);
    fs::write(&path, text).expect("write input file");
    path
}

fn identity3() -> PathBuf {
    write_file("identity3.json", r#"{"m":3,"outputs":[[[0]],[[1]],[[2]]]}"#)
}

// ---------------------------------------------------------------------------
// search / verify
// ---------------------------------------------------------------------------

#[test]
fn search_vacuous_entropy_floor_returns_seed_zero() {
    let v = run_json(
        &["search", "--d", "1", "--ell", "2", "--n0", "2", "--k0", "3", "--r", "1", "--t", "1"],
        "search",
        0,
    );
    assert_eq!(v["report"]["outcome"], "found");
    assert_eq!(v["report"]["found"], "0");
    assert_eq!(v["report"]["eligible_source_count"], 0);
}

#[test]
fn search_report_round_trips_through_verify() {
    let report = scratch("feasible-report.json");
    let out = run(&[
        "search", "--d", "1", "--ell", "2", "--n0", "2", "--k0", "2", "--r", "1", "--epsilon",
        "0", "--t", "2", "--out", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = run_json(&["verify", "--report", report.to_str().unwrap()], "verify", 0);
    assert_eq!(v["confirmed"], true);
    assert_eq!(v["matches_original"], true);
    assert_eq!(v["report"]["outcome"], "verified");
    assert_eq!(v["report"]["worst_error"]["exact"], "0/1");
}

#[test]
fn search_params_file_reproduces_the_flag_run() {
    let flags = run_json(
        &[
            "search", "--d", "2", "--ell", "3", "--n0", "3", "--k0", "3", "--r", "1",
            "--epsilon", "1/4", "--t", "2",
        ],
        "search",
        0,
    );
    let params = write_file(
        "params-copy.json",
        &serde_json::to_string(&flags["report"]["params"]).unwrap(),
    );
    let from_file =
        run_json(&["search", "--params", params.to_str().unwrap()], "search", 0);
    assert_eq!(from_file["report"], flags["report"]);
}

#[test]
fn search_exhausted_family_exits_three_with_best_seed() {
    // Asking for 2 perfectly uniform bits from a class that includes
    // constant maps is impossible, so the family gets fully enumerated.
    let v = run_json(
        &[
            "search", "--d", "1", "--ell", "2", "--n0", "2", "--k0", "0", "--r", "2",
            "--epsilon", "0", "--t", "1",
        ],
        "search",
        3,
    );
    assert_eq!(v["report"]["outcome"], "fail");
    assert!(v["report"]["best_seed"].is_string());
    assert!(v["report"]["worst_error"]["approx"].as_f64().unwrap() > 0.0);
}

#[test]
fn search_budget_checkpoints_and_resumes_to_the_same_answer() {
    let checkpoint = scratch("resume-checkpoint.json");
    let _ = fs::remove_file(&checkpoint);
    let args_base = [
        "search", "--d", "2", "--ell", "3", "--n0", "3", "--k0", "3", "--r", "1", "--epsilon",
        "1/4", "--t", "2",
    ];

    let mut budgeted: Vec<&str> = args_base.to_vec();
    budgeted.extend(["--budget-seconds", "0", "--resume", checkpoint.to_str().unwrap()]);
    let v = run_json(&budgeted, "search", 2);
    assert_eq!(v["report"]["outcome"], "budget");
    assert!(v["report"]["next_seed"].is_string());
    let cp: Value = serde_json::from_str(&fs::read_to_string(&checkpoint).unwrap()).unwrap();
    assert_eq!(cp["schema"], "f2ext/1");

    let mut resumed: Vec<&str> = args_base.to_vec();
    resumed.extend(["--resume", checkpoint.to_str().unwrap()]);
    let resumed = run_json(&resumed, "search", 0);
    let direct = run_json(&args_base, "search", 0);
    assert_eq!(resumed["report"]["found"], direct["report"]["found"]);
    assert_eq!(resumed["report"]["worst_error"], direct["report"]["worst_error"]);
}

// ---------------------------------------------------------------------------
// entropy / distance
// ---------------------------------------------------------------------------

#[test]
fn entropy_of_identity_map_is_full_width() {
    let map = identity3();
    let v = run_json(&["entropy", "--input", map.to_str().unwrap()], "entropy", 0);
    assert_eq!(v["min_entropy_floor"], 3);
    assert_eq!(v["max_probability"]["exact"], "1/8");
    assert_eq!(v["support_size"], 8);
}

#[test]
fn entropy_accepts_distribution_json() {
    let dist = write_file(
        "skewed.json",
        r#"{"n":2,"m_log":2,"counts":{"00":2,"01":1,"10":1}}"#,
    );
    let v = run_json(&["entropy", "--input", dist.to_str().unwrap()], "entropy", 0);
    assert_eq!(v["min_entropy_floor"], 1);
    assert_eq!(v["max_probability"]["exact"], "1/2");
}

#[test]
fn distance_of_a_distribution_to_itself_is_zero() {
    let dist = write_file(
        "self.json",
        r#"{"n":2,"m_log":2,"counts":{"00":1,"01":1,"10":2}}"#,
    );
    let v = run_json(
        &["distance", "--a", dist.to_str().unwrap(), "--b", dist.to_str().unwrap()],
        "distance",
        0,
    );
    assert_eq!(v["distance"]["exact"], "0/1");
}

#[test]
fn distance_to_uniform_of_the_identity_map_is_zero() {
    let map = identity3();
    let v = run_json(
        &["distance", "--a", map.to_str().unwrap(), "--uniform"],
        "distance",
        0,
    );
    assert_eq!(v["distance"]["exact"], "0/1");
    assert_eq!(v["against"], "uniform");
}

#[test]
fn distance_rejects_mismatched_widths() {
    let a = write_file("w2.json", r#"{"n":2,"m_log":1,"counts":{"00":1,"11":1}}"#);
    let b = write_file("w3.json", r#"{"n":3,"m_log":1,"counts":{"000":1,"111":1}}"#);
    let out = run(&["distance", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("widths differ"));
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

#[test]
fn reduce_decomposes_a_wide_quadratic_exactly() {
    let map = write_file("wide-quadratic.json", r#"{"m":6,"outputs":[[[0,1],[2]],[[3,4]],[[5]]]}"#);
    let v = run_json(
        &["reduce", "--map", map.to_str().unwrap(), "--k", "1", "--ell-target", "5", "--seed", "3"],
        "reduce",
        0,
    );
    assert_eq!(v["reconstruction_distance"]["exact"], "0/1");
    assert_eq!(v["ell_target"], 5);
    let parts = v["result"]["parts"].as_array().unwrap();
    assert!(!parts.is_empty());
    for part in parts {
        assert_eq!(part["map"]["m"], 5, "every part lives on the target input width");
    }
    let good = v["result"]["good_fraction"]["approx"].as_f64().unwrap();
    assert!(good >= 0.5, "good fraction {good} below 1 - 2^-k");
}

// ---------------------------------------------------------------------------
// sidon / nobf
// ---------------------------------------------------------------------------

#[test]
fn sidon_emits_a_verified_source_with_support_digest() {
    let v = run_json(&["sidon", "--t", "4"], "sidon", 0);
    assert_eq!(v["n"], 8);
    assert_eq!(v["k"], 4);
    assert_eq!(v["degree"], 2);
    assert_eq!(v["is_sidon"], true);
    assert_eq!(v["support_size"], 16);
    assert_eq!(v["min_entropy_floor"], 4);
    let support = v["support"].as_array().unwrap();
    assert_eq!(support.len(), 16);
    let mut sorted = support.clone();
    sorted.sort_by_key(|s| {
        let s = s.as_str().unwrap();
        (s.len(), u64::from_str_radix(&s.chars().rev().collect::<String>(), 2).unwrap())
    });
    assert_eq!(*support, sorted, "support list is sorted in canonical order");
    assert_eq!(v["support_digest"].as_str().unwrap().len(), 64);

    // The embedded source JSON is directly consumable by `nobf`.
    let source = write_file("sidon4-source.json", &serde_json::to_string(&v["source"]).unwrap());
    let n = run_json(&["nobf", "--input", source.to_str().unwrap()], "nobf", 0);
    assert_eq!(n["k"], 4);
    assert_eq!(n["min_entropy_floor"], 4);
    assert_eq!(n["support_digest"], v["support_digest"]);
    assert_eq!(n["good_positions"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(n["variety_witness"]["outputs"].as_array().unwrap().len(), 4);
}

#[test]
fn nobf_rejects_a_source_whose_good_coordinate_is_not_identity() {
    let bad = write_file(
        "bad-nobf.json",
        r#"{"m":2,"outputs":[[[0,1]],[[0]],[[1]]],"good_positions":[0,2]}"#,
    );
    let out = run(&["nobf", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

// ---------------------------------------------------------------------------
// find-sumset / find-affine
// ---------------------------------------------------------------------------

#[test]
fn sidon_support_has_no_two_by_three_sumset_but_always_a_pair() {
    let missing = run_json(
        &["find-sumset", "--sidon", "3", "--size-a", "2", "--size-b", "3"],
        "find-sumset",
        0,
    );
    assert_eq!(missing["found"], false);
    assert!(missing["a"].is_null());

    let pair = run_json(
        &["find-sumset", "--sidon", "3", "--size-a", "2", "--size-b", "2"],
        "find-sumset",
        0,
    );
    assert_eq!(pair["found"], true);

    // Witness check: every pairwise sum lands back in the support.
    let sidon = run_json(&["sidon", "--t", "3"], "sidon", 0);
    let support: Vec<String> =
        sidon["support"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().into()).collect();
    let parse = |s: &str| -> u64 {
        s.chars().enumerate().map(|(i, c)| if c == '1' { 1 << i } else { 0 }).sum()
    };
    let set: std::collections::HashSet<u64> = support.iter().map(|s| parse(s)).collect();
    for a in pair["a"].as_array().unwrap() {
        for b in pair["b"].as_array().unwrap() {
            let sum = parse(a.as_str().unwrap()) ^ parse(b.as_str().unwrap());
            assert!(set.contains(&sum), "sum of witness pair escapes the support");
        }
    }
}

#[test]
fn find_sumset_reads_support_set_files() {
    let set = write_file("full2.json", r#"{"n":2,"elems":["00","10","01","11"]}"#);
    let v = run_json(
        &["find-sumset", "--set", set.to_str().unwrap(), "--size-a", "2", "--size-b", "3"],
        "find-sumset",
        0,
    );
    assert_eq!(v["found"], true);
    assert_eq!(v["a"].as_array().unwrap().len(), 2);
    assert_eq!(v["b"].as_array().unwrap().len(), 3);
}

#[test]
fn sidon_support_contains_no_affine_plane() {
    let v = run_json(&["find-affine", "--sidon", "3", "--cap-dim", "2"], "find-affine", 0);
    assert!(v["dim"].as_u64().unwrap() <= 1);
    assert!(v["witness"]["offset"].is_string());
}

#[test]
fn full_space_support_saturates_the_affine_cap() {
    let set = write_file("full3.json", r#"{"n":3,"elems":["000","100","010","110","001","101","011","111"]}"#);
    let v = run_json(
        &["find-affine", "--set", set.to_str().unwrap(), "--cap-dim", "2"],
        "find-affine",
        0,
    );
    assert_eq!(v["dim"], 2);
    assert_eq!(v["witness"]["basis"].as_array().unwrap().len(), 2);
}

// ---------------------------------------------------------------------------
// certify / structure
// ---------------------------------------------------------------------------

#[test]
fn certify_is_false_for_linear_maps_and_true_for_all_products() {
    let id = identity3();
    let v = run_json(&["certify", "--map", id.to_str().unwrap(), "--r", "1"], "certify", 0);
    assert_eq!(v["certified"], false);

    let products = write_file(
        "all-products4.json",
        r#"{"m":4,"outputs":[[[0,1]],[[0,2]],[[0,3]],[[1,2]],[[1,3]],[[2,3]]]}"#,
    );
    let v = run_json(
        &["certify", "--map", products.to_str().unwrap(), "--r", "2"],
        "certify",
        0,
    );
    assert_eq!(v["certified"], true);
}

#[test]
fn structure_of_an_affine_map_covers_the_full_space() {
    let id = identity3();
    let v = run_json(
        &["structure", "--map", id.to_str().unwrap(), "--y", "000", "--a", "000,110", "--b", "010"],
        "structure",
        0,
    );
    assert_eq!(v["u_dim"], 3);
    assert_eq!(v["v_dim"], 3);
    assert_eq!(v["u"]["basis"].as_array().unwrap().len(), 3);
}

#[test]
fn structure_rejects_pairs_that_violate_the_relation() {
    let map = write_file("product2.json", r#"{"m":2,"outputs":[[[0,1]]]}"#);
    let out = run(&["structure", "--map", map.to_str().unwrap(), "--y", "0", "--a", "01", "--b", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sumset relation violated"));
}

// ---------------------------------------------------------------------------
// biclique
// ---------------------------------------------------------------------------

#[test]
fn dense_random_graph_above_the_edge_bound_contains_a_biclique() {
    let v = run_json(
        &["biclique", "--random", "8,8,41", "--seed", "5", "--order", "2"],
        "biclique",
        0,
    );
    assert_eq!(v["exceeds_znam_bound"], true);
    assert_eq!(v["found"], true);
    assert_eq!(v["left"].as_array().unwrap().len(), 2);
    assert_eq!(v["right"].as_array().unwrap().len(), 2);
    // The generated instance is echoed so the run is auditable.
    assert_eq!(v["graph"]["edges"].as_array().unwrap().len(), 41);
}

#[test]
fn biclique_reads_graph_files_and_reports_absence() {
    let complete = write_file(
        "k33.json",
        r#"{"left":3,"right":3,"edges":[[0,0],[0,1],[0,2],[1,0],[1,1],[1,2],[2,0],[2,1],[2,2]]}"#,
    );
    let v = run_json(
        &["biclique", "--graph", complete.to_str().unwrap(), "--order", "3"],
        "biclique",
        0,
    );
    assert_eq!(v["found"], true);
    assert_eq!(v["left"], serde_json::json!([0, 1, 2]));

    let matching = write_file(
        "matching4.json",
        r#"{"left":4,"right":4,"edges":[[0,0],[1,1],[2,2],[3,3]]}"#,
    );
    let v = run_json(
        &["biclique", "--graph", matching.to_str().unwrap(), "--order", "2"],
        "biclique",
        0,
    );
    assert_eq!(v["found"], false);
    assert!(v["left"].is_null());
}

// ---------------------------------------------------------------------------
// determinism, seeding, formats, exit codes
// ---------------------------------------------------------------------------

fn stdout_bytes(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(out.status.success() || out.status.code() == Some(3), "args {args:?}");
    out.stdout
}

#[test]
fn worker_count_never_changes_report_bytes() {
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "search", "--d", "2", "--ell", "3", "--n0", "3", "--k0", "3", "--r", "1",
            "--epsilon", "1/4", "--t", "2",
        ],
        vec!["reduce", "--map", "IDMAP", "--k", "1", "--ell-target", "5", "--seed", "11"],
        vec!["biclique", "--random", "10,10,60", "--seed", "11", "--order", "2"],
        vec!["find-sumset", "--sidon", "4", "--size-a", "2", "--size-b", "2"],
    ];
    let map = write_file("det-quadratic.json", r#"{"m":6,"outputs":[[[0,1],[2]],[[3,4]],[[5]]]}"#);
    for case in cases {
        let case: Vec<&str> =
            case.iter().map(|&a| if a == "IDMAP" { map.to_str().unwrap() } else { a }).collect();
        let mut one = case.clone();
        one.extend(["--workers", "1"]);
        let mut four = case.clone();
        four.extend(["--workers", "4"]);
        assert_eq!(
            stdout_bytes(&one),
            stdout_bytes(&four),
            "case {case:?} differs across worker counts"
        );
    }
}

#[test]
fn environment_seed_applies_and_flags_win() {
    let args = ["biclique", "--random", "6,6,20", "--order", "2"];
    let by_flag = stdout_bytes(&["biclique", "--random", "6,6,20", "--order", "2", "--seed", "9"]);
    let by_env = bin().args(args).env("F2EXT_SEED", "9").output().unwrap();
    assert_eq!(by_env.stdout, by_flag);

    let flag_wins =
        bin().args(args).arg("--seed").arg("5").env("F2EXT_SEED", "9").output().unwrap();
    let direct = stdout_bytes(&["biclique", "--random", "6,6,20", "--order", "2", "--seed", "5"]);
    assert_eq!(flag_wins.stdout, direct);
}

#[test]
fn csv_format_flattens_reports() {
    let map = identity3();
    let out = run(&["entropy", "--input", map.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("key,value"));
    assert!(text.contains("min_entropy_floor,3"));
    assert!(text.contains("max_probability.exact,1/8"));
    assert!(text.contains("schema,f2ext/1"));
}

#[test]
fn out_flag_writes_the_report_file_and_keeps_stdout_quiet() {
    let map = identity3();
    let target = scratch("entropy-out.json");
    let out = run(&[
        "entropy", "--input", map.to_str().unwrap(), "--out", target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["command"], "entropy");
}

#[test]
fn usage_errors_exit_one() {
    // Unknown subcommand.
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    // Missing required flags.
    assert_eq!(run(&["search", "--d", "1"]).status.code(), Some(1));
    // Nonexistent input file.
    assert_eq!(run(&["entropy", "--input", "/nonexistent/x.json"]).status.code(), Some(1));
    // Malformed JSON.
    let junk = write_file("junk.json", "{not json");
    assert_eq!(run(&["entropy", "--input", junk.to_str().unwrap()]).status.code(), Some(1));
    // Invalid worker count.
    let map = identity3();
    assert_eq!(
        run(&["entropy", "--input", map.to_str().unwrap(), "--workers", "0"]).status.code(),
        Some(1)
    );
    // Bad rational.
    assert_eq!(
        run(&["search", "--d", "1", "--ell", "2", "--n0", "2", "--k0", "x", "--r", "1", "--t", "1"])
            .status
            .code(),
        Some(1)
    );
    // No subcommand at all.
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["search", "--help"]).status.code(), Some(0));
}
