use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fresolvent"))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn iterate_identity_trace_has_41_rows() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "id.json", r#"{"F": {"kind": "identity"}, "dim": 2}"#);
    let out = run(&["iterate", "--spec", s(&spec), "--x0", "1,0", "--tol", "1e-12"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,x1,x2,norm,ratio,bound");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 41);
    assert_eq!(rows[40][3], 0.5f64.powi(40));
    assert!((rows[1][4] - 0.5).abs() < 1e-15);
}

#[test]
fn resolve_rotator_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let theta = std::f64::consts::FRAC_PI_3;
    let spec = write(
        &dir,
        "rot.json",
        &format!(r#"{{"F": {{"kind": "rotator", "theta": {theta:?}}}, "A": {{"form": "identity"}}, "dim": 2}}"#),
    );
    let pts = write(&dir, "e.csv", "x1,x2\n1,0\n0,1\n");
    let out = run(&["resolve", "--spec", s(&spec), "--input", s(&pts)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    let t = theta.sin() / (1.0 + theta.cos());
    // columns of ½[[1, −t], [t, 1]]
    let expected = [[0.5, 0.5 * t], [-0.5 * t, 0.5]];
    for (row, exp) in rows.iter().zip(expected) {
        assert!((row[2] - exp[0]).abs() < 1e-12 && (row[3] - exp[1]).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn project_onto_ball() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "ball.json",
        r#"{"F": {"kind": "rotator", "theta": 0.5}, "A": {"form": "normal_cone_ball", "center": [0, 0], "radius": 1.0}, "dim": 2}"#,
    );
    let pts = write(&dir, "p.csv", "x1,x2\n3,1\n0.1,0.2\n");
    let out = run(&["project", "--spec", s(&spec), "--input", s(&pts)]);
    assert!(out.status.success());
    let rows = data_rows(&String::from_utf8(out.stdout).unwrap());
    assert!(((rows[0][2].powi(2) + rows[0][3].powi(2)).sqrt() - 1.0).abs() < 1e-12);
    assert_eq!((rows[1][2], rows[1][3]), (0.1, 0.2));
}

#[test]
fn check_suite_passes() {
    let out = run(&["check"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
}

#[test]
fn extend_outputs_and_determinism() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "f.json", r#"{"F": {"kind": "identity"}, "dim": 1}"#);
    let data = write(&dir, "t.csv", "x,tx\n-1,-0.5\n-0.5,-0.25\n0,0\n0.5,0.25\n1,0.5\n");
    let query = write(&dir, "q.csv", "x\n-5\n-0.3\n2\n5\n");
    let mut outputs = Vec::new();
    for k in 0..2 {
        let g = dir.path().join(format!("g{k}.csv"));
        let q = dir.path().join(format!("q{k}.csv"));
        let d = dir.path().join(format!("d{k}.json"));
        let out = run(&[
            "extend", "--spec", s(&spec), "--input", s(&data), "--bound", "4", "--resolution", "129",
            "--graph-out", s(&g), "--query", s(&query), "--query-out", s(&q), "--diagnostics", s(&d),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((fs::read(&g).unwrap(), fs::read(&q).unwrap(), fs::read(&d).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows = data_rows(&String::from_utf8(outputs[0].1.clone()).unwrap());
    for r in rows {
        assert!((r[1] - 0.5 * r[0]).abs() < 1e-3, "{r:?}");
    }
    let diag: serde_json::Value = serde_json::from_slice(&outputs[0].2).unwrap();
    assert_eq!(diag["resolution"], 129);
}

#[test]
fn probe_reports_rate() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "a.json", r#"{"F": {"kind": "identity"}, "A": {"form": "zero"}, "dim": 3}"#);
    let out = run(&["probe", "--spec", s(&spec), "--targets", "25", "--seed", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["success_rate"], 1.0);
}

#[test]
fn malformed_inputs_exit_2_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let bad_json = write(&dir, "bad.json", "{\n  \"F\": {\"kind\": \"identity\"},\n  \"dim\": two\n}");
    let pts = write(&dir, "p.csv", "x1,x2\n1,2\n");
    let out = run(&["resolve", "--spec", s(&bad_json), "--input", s(&pts)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let spec = write(&dir, "ok.json", r#"{"F": {"kind": "identity"}, "A": {"form": "identity"}, "dim": 2}"#);
    let bad_csv = write(&dir, "bad.csv", "x1,x2\n1,2\n3,zz\n");
    let out = run(&["resolve", "--spec", s(&spec), "--input", s(&bad_csv)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = run(&["resolve", "--spec", s(&spec)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_lists_subcommands() {
    let out = run(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in ["resolve", "project", "iterate", "check", "extend", "probe"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}
