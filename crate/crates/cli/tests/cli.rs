use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn dope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dope")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bessel_gap_has_one_row_per_threshold() {
    let o = dope(&["gap", "--kernel", "bessel", "--alpha", "1", "--n", "0..8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "threshold,value,tail_estimate");
    assert_eq!(text.lines().count(), 10);
    let v = csv_column(&text, 1);
    // P[λ_1 = 0] = e^{-α}
    assert!((v[0] - (-1f64).exp()).abs() < 1e-12);
}

#[test]
fn percolation_gap_matches_brute_force() {
    let o = dope(&["gap", "--model", "percolation", "--M", "3", "--N", "3", "--p", "0.5"]);
    assert!(o.status.success());
    let v = csv_column(&stdout(&o), 1);
    // 3x3 at p = 1/2: L = 0 needs all nine cells empty, L <= 3 always
    assert_eq!(v.len(), 4);
    assert_eq!(v[0], 1.0 / 512.0);
    assert_eq!(v[3], 1.0);
}

#[test]
fn airy_gap_is_monotone() {
    let o = dope(&["gap", "--kernel", "airy", "--t", "-4..2:0.25"]);
    assert!(o.status.success());
    let v = csv_column(&stdout(&o), 1);
    assert_eq!(v.len(), 25);
    assert!(v.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn values_carry_seventeen_digits() {
    let o = dope(&["tw", "--t-grid", "0"]);
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    let value = line.split(',').nth(1).unwrap();
    let mantissa = value.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{value}");
}

#[test]
fn joint_tw_reports_consistency() {
    let o = dope(&["tw", "--joint", "-1,-2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let value: f64 = row[1].parse().unwrap();
    assert!((0.0..=1.0).contains(&value));
    assert_eq!(row[4], "true");
}

#[test]
fn exhaustive_words() {
    let o = dope(&["sample", "--model", "word", "--M", "2", "--N", "2", "--samples", "4", "--seed", "1", "--exhaustive"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total"], 4);
    let counts = v["counts"].as_array().unwrap();
    let find = |shape: serde_json::Value| counts.iter().find(|c| c["outcome"] == shape).unwrap()["count"].as_u64().unwrap();
    assert_eq!(find(serde_json::json!([2])), 3);
    assert_eq!(find(serde_json::json!([1, 1])), 1);
}

#[test]
fn sampling_is_thread_count_independent() {
    let args = ["sample", "--model", "geometric", "--M", "3", "--N", "3", "--q", "0.2", "--samples", "2000", "--seed", "9"];
    let one = Command::new(env!("CARGO_BIN_EXE_dope")).args(args).env("DOPE_THREADS", "1").output().unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_dope")).args(args).env("DOPE_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn manifest_reproduces_output() {
    let out = scratch("gap.csv");
    let out_s = out.to_str().unwrap();
    let o = dope(&["gap", "--kernel", "charlier", "--alpha", "2", "--M", "3", "--n", "0..5", "--out", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read(&out).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(format!("{out_s}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "gap");
    assert_eq!(manifest["params"]["alpha"], 2.0);
    let argv: Vec<String> = manifest["argv"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
    fs::remove_file(&out).unwrap();
    let again = Command::new(env!("CARGO_BIN_EXE_dope")).args(&argv).output().unwrap();
    assert!(again.status.success());
    assert_eq!(fs::read(&out).unwrap(), first);
    let sha = manifest["output_sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    let rerun: serde_json::Value = serde_json::from_str(&fs::read_to_string(format!("{out_s}.manifest.json")).unwrap()).unwrap();
    assert_eq!(rerun["output_sha256"], sha);
}

#[test]
fn sample_manifest_records_seed() {
    let out = scratch("perm.json");
    let out_s = out.to_str().unwrap();
    let o = dope(&["sample", "--model", "permutation", "--N", "5", "--samples", "300", "--seed", "42", "--out", out_s]);
    assert!(o.status.success());
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(format!("{out_s}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    let law: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(law["total"], 300);
}

#[test]
fn verify_suite_passes() {
    let o = dope(&["verify", "aztec-exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().filter(|l| !l.starts_with("aztec-exact")).all(|l| l.starts_with("PASS")));
}

#[test]
fn exit_codes() {
    assert_eq!(dope(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(dope(&["gap", "--kernel", "bessel", "--n", "0..3"]).status.code(), Some(2));
    assert_eq!(dope(&["gap", "--kernel", "bessel", "--alpha", "1", "--n", "3..1"]).status.code(), Some(2));
    assert_eq!(dope(&["gap", "--model", "percolation", "--M", "2", "--N", "2", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(dope(&["bogus"]).status.code(), Some(2));
    // node doubling cannot reach a tolerance below rounding
    let o = dope(&["tw", "--t-grid", "-2", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no convergence"));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_dope")).args(["verify", "words-exact"]).env("DOPE_THREADS", "zero").output().unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}
