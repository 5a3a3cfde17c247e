use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn heavytail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heavytail"))
        .args(args)
        .env_remove("HEAVYTAIL_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = heavytail(args);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr))
    })
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas/heavytail-output.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

const SMALL_RUNS: &[&[&str]] = &[
    &["certify", "--qmax", "12"],
    &["moments", "-n", "12"],
    &["gamma-density", "-s", "0.3", "--samples", "9"],
    &["ratio-scan", "-p", "2", "-q", "4", "--grid", "21"],
    &["signed-scan", "-p", "2", "-q", "3", "--grid", "21"],
    &["phi-scan", "--phi", "exp:0.4", "--grid", "11"],
    &["alpha", "--body", "square", "-n", "2", "--grid", "64"],
    &["alpha-star", "--body", "triangle", "-n", "2", "--grid", "64"],
    &["alpha", "--body", "cube", "-n", "3", "--samples", "20000", "--grid", "32"],
    &["cheb", "--system", "power-sgn:3", "--trials", "200"],
    &["thm4", "-n", "8", "--grid", "5"],
];

#[test]
fn every_command_validates_against_the_schema() {
    let v = schema();
    for args in SMALL_RUNS {
        let mut full = args.to_vec();
        full.extend(["--jobs", "1"]);
        let doc = json(&full);
        if let Err(e) = v.validate(&doc) {
            panic!("{args:?}: {e}");
        }
        assert_eq!(doc["tool"], "heavytail");
        assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(doc["config"]["command"], args[0]);
    }
}

#[test]
fn schema_rejects_a_malformed_certificate() {
    let mut doc = json(&["certify", "--qmax", "4", "--jobs", "1"]);
    doc["result"]["certificates"][0]["h_tilde_coeffs"][0] = Value::from(-96.0);
    assert!(schema().validate(&doc).is_err());
}

#[test]
fn output_is_byte_identical_for_one_worker() {
    for args in SMALL_RUNS {
        for format in ["json", "csv"] {
            let mut full = args.to_vec();
            full.extend(["--jobs", "1", "--format", format]);
            let a = heavytail(&full);
            let b = heavytail(&full);
            assert!(!a.stdout.is_empty());
            assert_eq!(a.stdout, b.stdout, "{full:?}");
        }
    }
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    for args in [
        &["certify", "--qmax", "16"][..],
        &["alpha", "--body", "cube", "-n", "3", "--samples", "150000", "--grid", "16"],
        &["cheb", "--system", "power-sgn:4", "--trials", "300"],
    ] {
        let mut one = args.to_vec();
        one.extend(["--jobs", "1"]);
        let mut four = args.to_vec();
        four.extend(["--jobs", "4"]);
        assert_eq!(json(&one)["result"], json(&four)["result"], "{args:?}");
    }
}

#[test]
fn csv_always_has_a_header() {
    for args in SMALL_RUNS {
        let mut full = args.to_vec();
        full.extend(["--jobs", "1", "--format", "csv"]);
        let out = String::from_utf8(heavytail(&full).stdout).unwrap();
        let mut lines = out.lines();
        let meta = lines.next().unwrap();
        assert!(meta.starts_with("# {\"tool\":\"heavytail\""), "{meta}");
        let header = lines.next().unwrap();
        assert!(header.split(',').all(|h| !h.is_empty() && !h.starts_with(|c: char| c.is_ascii_digit() || c == '-')));
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(out.as_bytes());
        let width = reader.headers().unwrap().len();
        for row in reader.records() {
            assert_eq!(row.unwrap().len(), width);
        }
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| heavytail(args).status.code();
    assert_eq!(code(&["certify", "--qmax", "10"]), Some(0));
    assert_eq!(code(&["certify", "--qmax", "3"]), Some(2));
    assert_eq!(code(&["certify", "--qmax", "11"]), Some(2));
    assert_eq!(code(&["ratio-scan", "-p", "4", "-q", "2"]), Some(2));
    assert_eq!(code(&["alpha", "--body", "dodecahedron"]), Some(2));
    assert_eq!(code(&["cheb", "--system", "power-sgn:7"]), Some(2));
    assert_eq!(code(&["thm4", "-n", "5"]), Some(2));
    assert_eq!(code(&["no-such-command"]), Some(2));
    assert_eq!(code(&["--tol", "2", "moments"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["phi-scan", "--phi", "sin"]), Some(2));
}

#[test]
fn failed_verdict_exits_with_one() {
    // A loose quadrature tolerance misses the exact polynomial moments, and
    // the run says so instead of passing.
    let out = heavytail(&["gamma-density", "-s", "0.3", "--tol", "0.9"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], false);
    assert!(!doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn seed_falls_back_to_the_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_heavytail"));
        cmd.args(["cheb", "--system", "power-sgn:2", "--trials", "20", "--jobs", "1"]).args(extra);
        match env {
            Some(v) => cmd.env("HEAVYTAIL_SEED", v),
            None => cmd.env_remove("HEAVYTAIL_SEED"),
        };
        let doc: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        doc["config"]["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, &[]), 0);
    assert_eq!(run(Some("77"), &[]), 77);
    assert_eq!(run(Some("77"), &["--seed", "5"]), 5);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = std::env::temp_dir().join(format!("heavytail-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("moments.json");
    let stdout = heavytail(&["moments", "-n", "6", "--jobs", "1"]).stdout;
    let status = heavytail(&["moments", "-n", "6", "--jobs", "1", "--out", path.to_str().unwrap()]);
    assert!(status.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn moments_match_subfactorials() {
    let doc = json(&["moments", "--nmax", "10"]);
    let rows = doc["result"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    let expected = ["0/1", "1/1", "2/1", "9/1", "44/1", "265/1", "1854/1", "14833/1", "133496/1", "1334961/1"];
    for (row, e) in rows.iter().zip(expected) {
        assert_eq!(row["moment"], e);
        assert_eq!(row["subfactorial"], e);
        assert_eq!(row["matches"], true);
    }
}

#[test]
fn ratio_scan_endpoint_value() {
    let doc = json(&["ratio-scan", "-p", "2", "-q", "4"]);
    let best = &doc["result"]["grid_best"];
    assert!((best["value"].as_f64().unwrap() - 1.7320508075688772).abs() < 1e-9);
    let s = best["param"].as_f64().unwrap();
    assert!(s == 0.0 || s == 1.0);
}

#[test]
fn square_axis_and_diagonal() {
    // Along an axis the marginal is uniform: (E U⁴)^{1/4}/(E U²)^{1/2} = (9/5)^{1/4}.
    // The diagonal marginal is triangular and larger: (12/5)^{1/4}.
    let doc = json(&["alpha", "--body", "square", "-n", "2", "-p", "2", "-q", "4"]);
    let points = doc["result"]["points"].as_array().unwrap();
    assert!((points[0]["value"].as_f64().unwrap() - 1.8f64.powf(0.25)).abs() < 1e-9);
    let best = doc["result"]["grid_best"]["value"].as_f64().unwrap();
    assert!((best - 2.4f64.powf(0.25)).abs() < 1e-9);
    let dir = doc["result"]["grid_best"]["direction"].as_array().unwrap();
    let (x, y) = (dir[0].as_f64().unwrap(), dir[1].as_f64().unwrap());
    assert!((x.abs() - y.abs()).abs() < 1e-9);
}

#[test]
fn certificate_csv_lists_each_q() {
    let out = String::from_utf8(heavytail(&["certify", "--qmax", "10", "--format", "csv"]).stdout).unwrap();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(out.as_bytes());
    let qs: Vec<String> = reader.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(qs, ["4", "6", "8", "10"]);
}
