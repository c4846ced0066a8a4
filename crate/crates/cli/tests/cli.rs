use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_padic-rigid"));
    c.env_remove("PADIC_RIGID_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn padic-rigid")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn json_of(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn assert_valid(schema: &str, doc: &Value) {
    let path = schema_dir().join(format!("{schema}.schema.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&raw).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema}: {}", msgs.join("; "));
}

#[test]
fn documented_exit_codes() {
    let d = json_of(&["density", "--poly", "x", "--bound", "10"]);
    assert_eq!(d["report"]["density"], 1.0);
    assert_eq!(d["report"]["density_exact"], "1/1");
    assert_eq!(code(&["zassenhaus", "realize", "--ring", "missing.json", "--pairs", "auto"]), 2);
    assert_eq!(code(&["mc", "gl", "--n", "2", "--q", "4", "--trials", "10"]), 1);
    assert_eq!(code(&["acceptance", "no-such-suite"]), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&["density", "--poly", "x^2+1", "--precision", "0"]), 2);
    assert_eq!(code(&["density", "--poly", "x^^2"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["mc", "run", "--experiment", "bogus"]), 2);
    assert_eq!(code(&["mc", "run", "--experiment", "gl:n=2,z=3"]), 2);
    assert_eq!(code(&["density", "--poly", "x", "--format", "xml"]), 2);
    let out = bin()
        .env("PADIC_RIGID_THREADS", "many")
        .args(["density", "--poly", "x", "--bound", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one() {
    assert_eq!(code(&["density", "--poly", "7", "--bound", "10"]), 1);
    assert_eq!(code(&["sample", "uniform", "--p", "6"]), 1);
    assert_eq!(code(&["density", "--poly", "x", "--bound", "100000000"]), 1);
}

#[test]
fn deterministic_and_thread_independent() {
    let args = ["mc", "gl", "--n", "3", "--q", "3", "--trials", "20000", "--seed", "7"];
    let a = run(&args).stdout;
    assert_eq!(a, run(&args).stdout);
    for threads in ["1", "3"] {
        let b = bin().env("PADIC_RIGID_THREADS", threads).args(args).output().unwrap();
        assert_eq!(a, b.stdout, "threads={threads}");
    }
    let other = run(&["mc", "gl", "--n", "3", "--q", "3", "--trials", "20000", "--seed", "8"]).stdout;
    assert_ne!(a, other);
}

#[test]
fn seed_is_a_string_and_defaults_to_zero() {
    let d = json_of(&["sample", "uniform", "--p", "7", "--precision", "5"]);
    assert_eq!(d["seed"], "0");
    assert_eq!(d["precision"], 5);
    assert_eq!(d["report"]["digits"].as_array().unwrap().len(), 5);
    let big = json_of(&["sample", "uniform", "--seed", "18446744073709551615"]);
    assert_eq!(big["seed"], "18446744073709551615");
}

#[test]
fn out_file_is_written_whole() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("density.json");
    let p = path.to_str().unwrap();
    assert_eq!(code(&["density", "--poly", "x^2+1", "--bound", "1000", "--out", p]), 0);
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(d["report"]["primes_scanned"], 168);
    // overwrite in place, no stray temporaries
    assert_eq!(code(&["density", "--poly", "x", "--bound", "100", "--out", p]), 0);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("density.json")]);
    // unwritable target is reported, not half-written
    assert_eq!(code(&["density", "--poly", "x", "--bound", "10", "--out", "/nonexistent-dir/x.json"]), 2);
}

#[test]
fn density_csv_rows_are_checkpoints() {
    let out = run(&["density", "--poly", "x^2+1", "--bound", "1000", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let bounds: Vec<&str> = rows.iter().map(|r| &r[col("bound")]).collect();
    assert_eq!(bounds, ["10", "100", "1000"]);
    assert_eq!(&rows[2][col("primes_scanned")], "168");
    assert_eq!(&rows[0][col("reciprocal_sum.numerator")], "7");
    assert_eq!(&rows[0][col("reciprocal_sum.denominator")], "10");
}

#[test]
fn reports_match_schemas() {
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("sample", vec!["sample", "uniform", "--p", "5"]),
        ("sample", vec!["sample", "tree", "--p", "3", "--depth", "2"]),
        ("sample", vec!["sample", "branch", "--p", "5", "--branch", "0110"]),
        ("sample", vec!["sample", "nearly-uniform", "--precision", "9"]),
        ("sample", vec!["sample", "supported", "--precision", "8"]),
        ("independence", vec!["independence", "--values", "1,7", "--p", "5", "--precision", "6"]),
        ("independence", vec!["independence", "--branches", "2", "--p", "5", "--degree", "1", "--height", "3"]),
        ("corner-build", vec!["corner", "build", "--precision", "8"]),
        ("corner-member", vec!["corner", "member", "--precision", "8", "--set", "0", "--generator", "0"]),
        ("corner-member", vec!["corner", "member", "--precision", "8", "--set", "1", "--vector", "0:1,4:-3"]),
        ("corner-rigidity", vec!["corner", "rigidity", "--precision", "8", "--from", "0", "--to", "0,1"]),
        ("corner-rigidity", vec!["corner", "rigidity", "--precision", "8", "--map", "mult:2"]),
        ("free-check", vec!["free-check", "--trials", "5", "--precision", "16", "--rank-window", "6", "--num-random", "1"]),
        ("zassenhaus-realize", vec!["zassenhaus", "realize", "--ring", "gaussian_integers", "--budget", "100"]),
        ("zassenhaus-realize", vec!["zassenhaus", "realize", "--ring", "integers", "--budget", "50", "--deterministic-only"]),
        ("density", vec!["density", "--poly", "x^3-2", "--bound", "2000"]),
        ("mc-gl", vec!["mc", "gl", "--n", "2", "--q", "2", "--trials", "100"]),
        ("mc-run", vec!["mc", "run", "--experiment", "containment:p=2,k=2,n=4,alpha=1.5", "--trials", "50"]),
        ("mc-run", vec!["mc", "run", "--experiment", "freeness:precision=16,window=6,num_random=1", "--trials", "3"]),
        ("acceptance", vec!["acceptance", "algebra,tree"]),
    ];
    for (schema, args) in cases {
        let doc = json_of(&args);
        assert_valid(schema, &doc);
    }
}

#[test]
fn schemas_reject_drift() {
    let mut doc = json_of(&["density", "--poly", "x", "--bound", "10"]);
    doc["report"]["density_exact"] = Value::from(1.0);
    let raw: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_dir().join("density.schema.json")).unwrap()).unwrap();
    assert!(!jsonschema::JSONSchema::compile(&raw).unwrap().is_valid(&doc));
}

#[test]
fn corner_model_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let m = model.to_str().unwrap();
    assert_eq!(code(&["corner", "build", "--precision", "10", "--seed", "3", "--out", m]), 0);
    let saved = json_of(&["corner", "member", "--model", m, "--set", "0,1", "--generator", "0"]);
    let fresh = json_of(&["corner", "member", "--precision", "10", "--seed", "3", "--set", "0,1", "--generator", "0"]);
    assert_eq!(saved["report"], fresh["report"]);
    assert_eq!(saved["report"]["membership"]["verdict"], "InAtPrecision");
    // width-one modules over Z admit no non-multiplication map
    let narrow = ["corner", "rigidity", "--module-rank", "1", "--precision", "8"];
    assert_eq!(code(&narrow), 2);
}

#[test]
fn pairs_file_accepts_strings_and_integers() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.json");
    std::fs::write(&pairs, r#"[{"a": ["1", 1], "e": [1, "0"]}, [[0, 1], ["1", "1"]]]"#).unwrap();
    let d = json_of(&[
        "zassenhaus",
        "realize",
        "--ring",
        "z_cross_z",
        "--pairs",
        pairs.to_str().unwrap(),
        "--budget",
        "200",
        "--deterministic-only",
    ]);
    let ps = d["report"]["pairs"].as_array().unwrap();
    assert_eq!(ps.len(), 2);
    assert_eq!(ps[0]["a"], serde_json::json!(["1", "1"]));
    assert_eq!(code(&["zassenhaus", "realize", "--ring", "integers", "--pairs", "/no/such/pairs.json"]), 2);
    std::fs::write(&pairs, "{not json").unwrap();
    assert_eq!(code(&["zassenhaus", "realize", "--ring", "integers", "--pairs", pairs.to_str().unwrap()]), 2);
}

#[test]
fn acceptance_lines_go_to_stderr() {
    let out = run(&["acceptance", "algebra"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("PASS 10 algebra"), "{err}");
    let d: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(d["report"]["passed"], true);
}
