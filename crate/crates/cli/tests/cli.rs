use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use whichpath::hilbert::{ProjectiveMeasurement, Projector, StateVector, C64};
use whichpath::json::to_canonical_string;
use whichpath::measures::tradeoff_report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_whichpath"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const QUBIT_PAIR: &str = r#"{"kind":"pair","psi1":[[1,0],[0,0]],"psi2":[[0,0],[1,0]],"measurement":{"basis":"standard"}}"#;

#[test]
fn tradeoff_on_orthogonal_qubits() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "pair.json", QUBIT_PAIR);
    let out = run(&["tradeoff", s(&f)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["slack"].as_f64().unwrap().abs() <= 1e-10);
    assert_eq!(v["per_outcome"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_and_invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("broken.json", "{\"kind\": \"pair\", "),
        ("unknown_key.json", r#"{"kind":"pair","psi1":[[1,0]],"psi2":[[1,0]],"measurement":{"basis":"standard"},"note":1}"#),
        ("unnormalized.json", r#"{"kind":"pair","psi1":[[1,0],[1,0]],"psi2":[[0,0],[1,0]],"measurement":{"basis":"standard"}}"#),
        ("field.json", r#"{"kind":"field","field":{"fock":2}}"#),
    ];
    for (name, body) in cases {
        let f = write(&dir, name, body);
        assert_eq!(run(&["tradeoff", s(&f)]).status.code(), Some(2), "{name}");
    }
    assert_eq!(run(&["tradeoff", "/nonexistent/scenario.json"]).status.code(), Some(2));
}

#[test]
fn tradeoff_output_is_the_canonical_library_report() {
    let h = 0.5f64;
    let a = StateVector::new(vec![C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
    let b = StateVector::new(vec![C64::new(h, 0.0), C64::new(0.0, h), C64::new(-h, 0.0), C64::new(0.0, -h)]).unwrap();
    // blocks {0,1} and {2,3} of the standard basis
    let block = |i: usize| {
        Projector::dense(whichpath::Operator::from_fn(4, |r, c| {
            C64::new(if r == c && r / 2 == i { 1.0 } else { 0.0 }, 0.0)
        }))
    };
    let m = ProjectiveMeasurement::new(4, vec![("low".into(), block(0)), ("high".into(), block(1))]).unwrap();
    let expected = to_canonical_string(&tradeoff_report(&a, &b, &m).unwrap()).unwrap();

    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "dim4.json",
        r#"{"kind":"pair",
            "psi1":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]],
            "psi2":[[0.5,0],[0,0.5],[-0.5,0],[0,-0.5]],
            "measurement":{"labels":["low","high"],"projectors":[
              [[[1,0],[0,0],[0,0],[0,0]],[[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]],
              [[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]]}}"#,
    );
    let out = run(&["tradeoff", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), expected);
}

#[test]
fn fringe_csv_for_ideal_interferometer() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "ideal.json",
        r#"{"kind":"interferometer","chi":0,"flipper_on":false,"field":{"coherent":1.0,"truncation":30}}"#,
    );
    let csv_path = dir.path().join("scan.csv");
    let out = run(&["fringe", s(&f), "--chi-steps", "3", "--csv", s(&csv_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["chi", "label", "probability"]);
    let rows: Vec<(f64, String, f64)> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].to_string(), r[2].parse().unwrap())
        })
        .collect();
    let beam_a: Vec<f64> = rows.iter().filter(|r| r.1 == "A").map(|r| r.2).collect();
    for (got, want) in beam_a.iter().zip([1.0, 0.5, 0.0]) {
        assert!((got - want).abs() < 1e-10, "{beam_a:?}");
    }
    let chis: Vec<f64> = rows.iter().map(|r| r.0).collect();
    assert!(chis.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn fringe_rejects_bad_steps_and_unwritable_paths() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "pair.json", QUBIT_PAIR);
    assert_eq!(run(&["fringe", s(&f), "--chi-steps", "1"]).status.code(), Some(2));
    let blocked = dir.path().join("missing").join("scan.csv");
    assert_eq!(run(&["fringe", s(&f), "--csv", s(&blocked)]).status.code(), Some(2));
    assert_eq!(
        run(&["fringe", s(&f), "--measurement", "beam"]).status.code(),
        Some(2),
        "measurement flag is for interferometers"
    );
}

#[test]
fn fringe_output_is_bit_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "flip.json",
        r#"{"kind":"interferometer","chi":0,"flipper_on":true,"field":{"coherent":[1.0,0.3],"truncation":30},"grid":4}"#,
    );
    let args = ["fringe", s(&f), "--chi-steps", "17", "--measurement", "position-spin"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 1 + 17 * 16);
}

#[test]
fn np_reports() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"kind":"distributions","p":[0.8,0.2],"q":[0.2,0.8]}"#, 0.4),
        (r#"{"kind":"distributions","p":[0.3,0.7],"q":[0.3,0.7]}"#, 1.0),
        (r#"{"kind":"distributions","p":[1,0,0],"q":[0,0.5,0.5]}"#, 0.0),
    ];
    for (i, (body, sum)) in cases.iter().enumerate() {
        let f = write(&dir, &format!("np{i}.json"), body);
        let out = run(&["np", s(&f)]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        let best = &v["best_sum"];
        let got = best["err1"].as_f64().unwrap() + best["err2"].as_f64().unwrap();
        assert!((got - sum).abs() < 1e-12, "case {i}: {got}");
        assert!(v["min_sum_slack"].as_f64().unwrap() >= -1e-10);
    }
    let f = write(&dir, "mismatch.json", r#"{"kind":"distributions","p":[1.0],"q":[0.5,0.5]}"#);
    assert_eq!(run(&["np", s(&f)]).status.code(), Some(2));
}

#[test]
fn field_report_for_two_peaks() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "tp.json", r#"{"kind":"field","field":{"two_peak":[5,15],"truncation":20}}"#);
    let out = run(&["field", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["stats"]["delta_n"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(v["indistinguishability"].as_f64().unwrap(), 0.0);
    assert_eq!(v["interference_power"].as_f64().unwrap(), 0.0);
}

#[test]
fn verify_flag_validation() {
    assert_eq!(run(&["verify", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--max-dim", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--tolerance", "-1"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_and_mode_independent() {
    let args = ["verify", "--seed", "7", "--trials", "50", "--max-dim", "5"];
    let a = run(&args);
    let b = run(&args);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let c = run(&seq_args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn verify_default_sweep_passes() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&["verify", "--seed", "1", "--trials", "1000", "--max-dim", "6", "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    for p in v["properties"].as_array().unwrap() {
        if p["informational"] == false {
            assert_eq!(p["violations"], 0, "{}", p["name"]);
            assert_eq!(p["passed"], 1000);
        }
    }
}
