//! Exercises the binary end to end: exit codes, override echoes, fuzzy
//! validation output, surface export and sweep artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn wardsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wardsim")).args(args).output().expect("binary runs")
}

fn data(file: &str) -> String {
    format!("{}/data/{file}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn missing_config_file_exits_two() {
    let out = wardsim(&["run", "--config", "definitely-missing.json"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("definitely-missing.json"));
}

#[test]
fn invalid_config_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"beds": 0}"#).unwrap();
    let out = wardsim(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("beds"), "{}", stderr(&out));

    std::fs::write(&config, r#"{"bedz": 3}"#).unwrap();
    let out = wardsim(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("bedz"), "{}", stderr(&out));
}

#[test]
fn unknown_flags_are_rejected() {
    let out = wardsim(&["run", "--config", &data("base.json"), "--warp-speed"]);
    assert!(!out.status.success());
}

#[test]
fn run_applies_and_echoes_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = wardsim(&[
        "run",
        "--config",
        &data("base.json"),
        "--days",
        "1",
        "--doctors",
        "0",
        "--robots",
        "4",
        "--output",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.contains("# override: doctors=0"), "{trace}");
    assert!(trace.contains("# override: robots=4"));
    assert!(trace.contains("# override: days=1"));
    assert!(stdout(&out).contains("finalMeanMentalState"));
    assert!(dir.path().join("patients.csv").exists());
    assert!(!dir.path().join("network.csv").exists());
}

#[test]
fn dump_network_writes_the_edge_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = wardsim(&[
        "run",
        "--config",
        &data("base.json"),
        "--days",
        "2",
        "--output",
        dir.path().to_str().unwrap(),
        "--dump-network",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let network = std::fs::read_to_string(dir.path().join("network.csv")).unwrap();
    let columns = network.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(columns, "day,i,j,absDiff,color");
    assert!(network.lines().any(|l| l.ends_with("green") || l.ends_with("yellow") || l.ends_with("red")));
}

#[test]
fn validate_fls_accepts_the_shipped_definition() {
    let out = wardsim(&["validate-fls", &data("doctor.fls")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("rules: 9"), "{text}");
    assert!(text.contains("completeness: ok"));
}

#[test]
fn validate_fls_rejects_broken_definitions_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.fls");
    std::fs::write(&path, "var input x 0 ten\n").unwrap();
    let out = wardsim(&["validate-fls", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));

    let gap = "\
var input x 0 10
var output y 0 10
term x Low tri 0 0 4
term x High tri 6 10 10
term y Mid tri 2 5 8
rule IF x IS Low THEN y IS Mid
rule IF x IS High THEN y IS Mid
";
    std::fs::write(&path, gap).unwrap();
    let out = wardsim(&["validate-fls", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("incomplete rule base"), "{}", stderr(&out));
}

#[test]
fn fls_surface_writes_a_grid_inside_the_output_universe() {
    let dir = tempfile::tempdir().unwrap();
    let surface = dir.path().join("surface.csv");
    let out = wardsim(&[
        "fls-surface",
        &data("doctor.fls"),
        "--grid",
        "3",
        "--output",
        surface.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&surface).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let crisp: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((10.0..=60.0).contains(&crisp), "{row}");
    }
}

#[test]
fn fls_surface_requires_two_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.fls");
    let one_input = "\
var input x 0 10
var output y 0 10
term x Low tri 0 0 10
term x High tri 0 10 10
term y Mid tri 2 5 8
rule IF x IS Low THEN y IS Mid
rule IF x IS High THEN y IS Mid
";
    std::fs::write(&path, one_input).unwrap();
    let out = wardsim(&["fls-surface", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("two-input"), "{}", stderr(&out));
}

fn tiny_sweep_json() -> String {
    r#"{
        "base": {
            "patients": 6, "beds": 4, "visitors": 2,
            "duration_days": 2, "replications": 2, "seed_base": 7,
            "doctors": {"senior": 1, "junior": 1},
            "robots": {"humanlike": 0, "robotlike": 0}
        },
        "baseline": "baseline",
        "scenarios": [
            {"name": "baseline"},
            {"name": "robots", "overrides": {"doctors": {"senior": 0, "junior": 0}, "robots": {"humanlike": 0, "robotlike": 2, "robotlike_h": 0.1}}}
        ]
    }"#
    .to_string()
}

fn run_sweep_to(dir: &Path, jobs: &str) -> Output {
    let sweep_path = dir.join("sweep.json");
    std::fs::write(&sweep_path, tiny_sweep_json()).unwrap();
    let out_dir = dir.join(format!("out-{jobs}"));
    wardsim(&[
        "sweep",
        "--config",
        sweep_path.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
        "--jobs",
        jobs,
    ])
}

#[test]
fn sweep_writes_summary_report_and_per_run_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_sweep_to(dir.path(), "2");
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let base = dir.path().join("out-2");

    let summary = std::fs::read_to_string(base.join("summary.csv")).unwrap();
    let data_rows = summary.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(data_rows, 2 * 8, "2 scenarios x 8 responses");

    let report = std::fs::read_to_string(base.join("report.csv")).unwrap();
    for line in report.lines().filter(|l| l.starts_with("baseline,")) {
        assert!(line.ends_with(",0.000000"), "baseline delta must be zero: {line}");
    }

    for scenario in ["baseline", "robots"] {
        for rep in 0..2 {
            let trace = base.join(scenario).join(format!("rep{rep}")).join("trace.csv");
            assert!(trace.exists(), "missing {trace:?}");
            let text = std::fs::read_to_string(&trace).unwrap();
            assert!(text.contains(&format!("# scenario: {scenario}")));
            assert!(text.contains(&format!("# seed: {}", 7 + rep)));
        }
    }
}

#[test]
fn sweep_output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_sweep_to(dir.path(), "1").status.success());
    assert!(run_sweep_to(dir.path(), "4").status.success());
    for file in ["summary.csv", "report.csv", "baseline/rep0/trace.csv", "robots/rep1/trace.csv"] {
        let a = std::fs::read(dir.path().join("out-1").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("out-4").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between worker counts");
    }
}

#[test]
fn shipped_sweep_produces_five_scenario_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = wardsim(&[
        "sweep",
        "--config",
        &data("sweep.json"),
        "--output",
        dir.path().to_str().unwrap(),
        "--jobs",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    let scenarios: std::collections::BTreeSet<&str> = summary
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("scenario,"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(scenarios.len(), 5, "{scenarios:?}");
    assert!(scenarios.contains("baseline-all-doctors"));
    assert!(scenarios.contains("junior-heavy"));
}

#[test]
fn sweep_without_baseline_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_path = dir.path().join("sweep.json");
    std::fs::write(
        &sweep_path,
        r#"{"baseline": "gone", "scenarios": [{"name": "only"}]}"#,
    )
    .unwrap();
    let out = wardsim(&["sweep", "--config", sweep_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing baseline"), "{}", stderr(&out));
}
