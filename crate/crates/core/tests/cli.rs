use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("locperiod").chain(args.iter().copied());
    let code = locperiod::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

#[test]
fn fact_passes_at_the_documented_example() {
    let (code, v) = report(&[
        "verify", "fact", "--q", "2", "--alpha1", "1", "--alpha2", "1", "--alpha3", "1", "--radius", "60",
        "--tol", "1e-8",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["config"]["radius"], 60);
}

#[test]
fn steinberg_local_factor_at_two_is_one_third() {
    let (code, v) = report(&["compute", "ellv", "--case", "steinberg", "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["value"]["exact"], "1/3");
    assert_eq!(v["expected"]["exact"], "1/3");
}

#[test]
fn every_report_has_the_common_fields() {
    let cases: &[&[&str]] = &[
        &["verify", "steinberg", "--q", "3", "--lambda1", "1/2", "--twist", "-1"],
        &["verify", "kappa", "--q", "3", "--lambda", "1"],
        &["verify", "true", "--q", "2", "--lambda", "1/3", "--lambda1", "1", "--lambda2", "-1/2"],
        &["verify", "hecke", "--q", "3", "--lambda", "1", "--lambda1", "1/2"],
        &["verify", "atkin", "--q", "2", "--twist", "-1", "--lambda1", "1/4", "--lambda2", "1"],
        &["compute", "iv", "--q", "5", "--lambda1", "1", "--lambda2", "1/2", "--lambda3", "-1"],
        &["compute", "ellv", "--case", "away", "--q", "2"],
    ];
    for args in cases {
        let (code, v) = report(args);
        assert_eq!(code, 0, "{args:?}: {v}");
        for key in ["schema", "config", "command", "inputs", "values", "error_bound", "expected", "pass"] {
            assert!(v.get(key).is_some(), "{args:?} lacks {key}");
        }
    }
}

#[test]
fn failed_verification_exits_with_one() {
    let (code, v) = report(&[
        "verify", "atkin", "--q", "3", "--lambda", "1", "--lambda1", "1/2", "--lambda2", "1/2", "--eta", "-1",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["pass"], false);
    let (code, _) = report(&[
        "verify", "atkin", "--q", "3", "--lambda", "1", "--lambda1", "1/2", "--lambda2", "1/2", "--eta", "1",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn usage_errors_exit_with_two() {
    let (code, out, err) = run(&["verify", "fact", "--q", "2", "--bogus"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("--bogus"), "{err}");
    assert_eq!(run(&["verify", "fact", "--q", "4"]).0, 2);
    assert_eq!(run(&["verify", "fact", "--q", "2", "--lambda1", "3"]).0, 2);
    assert_eq!(run(&["verify", "fact", "--q", "2", "--tol", "0"]).0, 2);
    assert_eq!(run(&["verify", "fact", "--q", "2", "--precision", "40"]).0, 2);
    assert_eq!(run(&["moment", "assemble", "--data", "no/such/file.json", "--p", "3", "--q", "2"]).0, 2);
}

#[test]
fn help_exits_with_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "verify", "true", "--q", "3", "--theta", "7/10", "--lambda1", "1/2", "--theta2", "5/2", "--backend",
        "approx",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.0, 0, "{}", a.1);
    assert_eq!(a, b);
}

#[test]
fn moment_report_matches_the_golden_file() {
    let golden = include_str!("data/golden_report.json");
    let args = [
        "moment", "assemble", "--data", "tests/data/golden_dataset.json", "--p", "3", "--q", "2",
        "--case-constant", "1", "--level-lambdas", "1/2,-1",
    ];
    let (code, out, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(out, golden);
}

#[test]
fn output_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("locperiod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ellv.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["compute", "ellv", "--case", "steinberg", "--q", "3", "--output", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["values"]["value"]["exact"], "1/4");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_locperiod");
    let ok = Command::new(bin)
        .args(["compute", "ellv", "--case", "steinberg", "--q", "2"])
        .env("LOCPERIOD_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["frobnicate"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
}
