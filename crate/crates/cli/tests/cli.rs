use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wirebill(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wirebill"))
        .args(args)
        .current_dir(dir)
        .env_remove("WIREBILL_OUT_DIR")
        .env("WIREBILL_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CIRCLE: &str = r#"{"kind": "circle", "radius": 1.0}"#;
const COIL: &str = r#"{"kind": "coil", "epsilon": 0.05, "m": 2}"#;

#[test]
fn check_nice_on_the_coil_passes() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "coil.json", COIL);
    let o = wirebill(&["check-nice", "--curve", &curve], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(report["seed"], 0);
}

#[test]
fn deficit_csv_has_digest_header_and_limit() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "circle.json", CIRCLE);
    let o = wirebill(
        &["deficit", "--curve", &curve, "--x-end", "1.5707963267948966", "--out", "deficit.csv", "--seed", "9"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("deficit.csv")).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("# config-sha256=") && first.ends_with(" seed=9"), "{first}");
    assert_eq!(
        lines.next().unwrap(),
        "n,deficit,n2_deficit,chords2_deficit,richardson,limit,reference_cubed,reference_uncubed"
    );
    let row: Vec<&str> = lines.last().unwrap().split(',').collect();
    let limit: f64 = row[5].parse().unwrap();
    assert!((limit - 0.161491).abs() < 1e-6, "limit {limit}");
    // the JSON summary goes to stdout when the CSV went to a file
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((summary["summary"]["limit"].as_f64().unwrap() - limit).abs() < 1e-15);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "ellipse.json", r#"{"kind": "planar-ellipse", "a": 2.0, "b": 1.0}"#);
    let run = |name: &str| {
        let o = wirebill(&["orbit", "--curve", &curve, "--steps", "200", "--alpha0", "0.4", "--out", name], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        fs::read(dir.path().join(name)).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 2 + 201);
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "exp.json",
        r#"{"curve": {"kind": "circle", "radius": 1.0}, "seed": 4, "orbit": {"steps": 10, "alpha0": 0.7}}"#,
    );
    let o = wirebill(&["orbit", "--config", &cfg, "--steps", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with("seed=4"));
    assert_eq!(text.lines().count(), 2 + 4);
}

#[test]
fn different_configs_have_different_digests() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "circle.json", CIRCLE);
    let digest = |m: &str| {
        let o = wirebill(&["gutkin", "--curve", &curve, "--m", m], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config_sha256"].as_str().unwrap().to_string()
    };
    assert_ne!(digest("4"), digest("5"));
    assert_eq!(digest("4"), digest("4"));
}

#[test]
fn negative_resolution_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "circle.json", CIRCLE);
    let o = wirebill(&["curve-info", "--curve", &curve, "--resolution", "-5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field `resolution`"), "{}", stderr(&o));
}

#[test]
fn unknown_and_invalid_fields_are_schema_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"curve": {"kind": "circle", "radius": 1.0}, "nice": {"grid": 64, "marjin": 1}}"#);
    let o = wirebill(&["check-nice", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nice"), "{}", stderr(&o));

    let coil = write(dir.path(), "coil.json", r#"{"kind": "coil", "epsilon": 0.05, "m": 1}"#);
    let o = wirebill(&["curve-info", "--curve", &coil], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("m"), "{}", stderr(&o));

    let o = wirebill(&["curve-info"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("field `curve`"));
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write(dir.path(), "flat.json", r#"{"kind": "flat-point"}"#);
    let o = wirebill(&["orbit", "--curve", &flat, "--steps", "10"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("reflection"), "{}", stderr(&o));
}

#[test]
fn out_dir_variable_places_relative_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "circle.json", CIRCLE);
    let o = Command::new(env!("CARGO_BIN_EXE_wirebill"))
        .args(["periodic", "--curve", &curve, "--q", "4", "--out", "square.csv"])
        .current_dir(dir.path())
        .env("WIREBILL_OUT_DIR", dir.path().join("results"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("results/square.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "vertex,x,residual");
}

#[test]
fn ellipsoid_commute_reports_both_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let o = wirebill(&["ellipsoid", "commute"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["xi_gap"].as_f64().unwrap() < 1e-6);
    assert!(v["arc_length_gap"].as_f64().unwrap() > 1e-2);

    let o = wirebill(&["ellipsoid", "commute", "--axes", "1,2,3"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn striction_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let curve = write(dir.path(), "coil.json", COIL);
    let o = wirebill(&["striction", "--curve", &curve, "--d", "1.0", "--samples", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines().skip(1);
    assert_eq!(lines.next().unwrap(), "t,sStarOverL,deviation,nonCylindricity");
    for line in lines {
        let s: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((s - 0.5).abs() < 1e-10);
    }
}
