//! End-to-end runs of the compiled binary against a temp directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_currents");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_instance(dir: &Path) -> PathBuf {
    let path = dir.join("instance.json");
    fs::write(
        &path,
        r#"{
            "points": [[0.0, 0.0], [2.0, 0.3], [-1.4, 1.8], [0.6, -2.1]],
            "background": {"kind": "lebesgue"},
            "region": {"kind": "ball", "center": [0.0, 0.0], "radius": 5.0}
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn grow_trace_conserves_total_radius() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(dir.path());
    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "grow",
        "--points",
        instance.to_str().unwrap(),
        "--target",
        "3.0",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time,ball,cx,cy,radius,parent,total_radius"
    );
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 7, "row {line:?}");
        let time: f64 = cols[0].parse().unwrap();
        let total: f64 = cols[6].parse().unwrap();
        assert!(
            (total - time).abs() <= 1e-9 * (1.0 + time),
            "total radius {total} drifted from clock {time}"
        );
        rows += 1;
    }
    assert!(rows >= 4, "expected at least one row per seed");
}

#[test]
fn mcr_reads_a_recorded_trace() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(dir.path());
    let trace = dir.path().join("trace.csv");
    let grow = run(&[
        "grow",
        "--points",
        instance.to_str().unwrap(),
        "--target",
        "4.0",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(grow.status.success(), "{}", stderr_of(&grow));

    let out = run(&["mcr", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(stdout.contains("K(exact)"), "{stdout}");
    assert!(stdout.contains("n = 4"), "{stdout}");
}

#[test]
fn energy_reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(dir.path());
    let mut reports = Vec::new();
    for (name, threads) in [("a.json", "1"), ("b.json", "3"), ("c.json", "3")] {
        let path = dir.path().join(name);
        let out = run(&[
            "energy",
            "--points",
            instance.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_of(&out));
        reports.push(fs::read(&path).unwrap());
    }
    assert_eq!(reports[1], reports[2], "rerun changed the report");
    assert_eq!(reports[0], reports[1], "thread count changed the report");
}

#[test]
fn verify_pipeline_passes_and_draws() {
    let dir = TempDir::new().unwrap();
    let instance = write_instance(dir.path());
    let report = dir.path().join("report.json");
    let picture = dir.path().join("construction.svg");
    let out = run(&[
        "verify",
        "--points",
        instance.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--svg",
        picture.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["weak_bound_holds"], serde_json::Value::Bool(true));
    assert!(json["theorem"]["energy"].is_number());
    let svg = fs::read_to_string(&picture).unwrap();
    assert!(svg.starts_with("<svg"), "unexpected picture prefix");
}

#[test]
fn generated_sources_work() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("hex.csv");
    let out = run(&[
        "grow",
        "--hex",
        "1",
        "--target",
        "5.0",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let annuli = dir.path().join("line.json");
    let table = dir.path().join("line.csv");
    let out = run(&[
        "annuli",
        "--line",
        "13.0",
        "--target",
        "9.0",
        "--out",
        annuli.to_str().unwrap(),
        "--csv",
        table.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&annuli).unwrap()).unwrap();
    assert!(json.is_array() || json.is_object());
    assert!(fs::read_to_string(&table).unwrap().lines().count() > 1);
}

#[test]
fn bad_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let out = run(&[
        "energy",
        "--points",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).starts_with("error:"));

    let garbled = dir.path().join("garbled.json");
    fs::write(&garbled, "not an instance").unwrap();
    let out = run(&["energy", "--points", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("malformed instance"));

    let out = run(&["grow", "--poisson", "6", "--target", "2.0", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--seed"));
}
