//! End-to-end checks of the `dirdep` binary: flag handling, exit codes,
//! file ingestion, export round-trips, and scheduling-independent output.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dirdep(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirdep"))
        .args(args)
        .current_dir(dir)
        .env_remove("DIRDEP_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn datasets_lists_embedded_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dirdep(&["datasets"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("bloodpressure"));
    assert!(text.contains("wind"));
}

#[test]
fn dataset_export_round_trips_the_statistic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dirdep(&["datasets", "--export", "wind"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("wind.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 22);
    assert_eq!(lines[1], "356,119");

    let embedded = dirdep(
        &["test", "--dataset", "wind", "--stat", "dcor:energy:0.5", "-B", "50", "--seed", "5", "--json"],
        dir.path(),
    );
    assert!(embedded.status.success(), "{}", stderr(&embedded));
    let from_file = dirdep(
        &["test", "wind.csv", "--stat", "dcor:energy:0.5", "-B", "50", "--seed", "5", "--json"],
        dir.path(),
    );
    assert!(from_file.status.success(), "{}", stderr(&from_file));

    let a: serde_json::Value = serde_json::from_str(&stdout(&embedded)).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&from_file)).unwrap();
    let sa = a["statistic"].as_f64().unwrap();
    let sb = b["statistic"].as_f64().unwrap();
    assert!((sa - sb).abs() <= 1e-12, "{sa} vs {sb}");
    assert_eq!(a["p_value"], b["p_value"]);
}

#[test]
fn unknown_dataset_explains_the_ingestion_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dirdep(&["test", "--dataset", "rock", "--stat", "dcor"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("unknown dataset"), "{msg}");
    assert!(msg.contains("--x-type sphere"), "{msg}");
}

#[test]
fn usage_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // unknown flag fails fast
    let out = dirdep(&["test", "--no-such-flag"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    // missing config names the path
    let out = dirdep(&["power", "--config", "missing.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing.cfg"));
    // kernel flag does not apply to ccor
    let out = dirdep(
        &["test", "--dataset", "wind", "--stat", "ccor", "--kernel", "ratio"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    // neither file nor dataset
    let out = dirdep(&["test"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_data_is_a_statistical_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("const.csv"), "a,b\n10,20\n10,30\n10,40\n").unwrap();
    let out = dirdep(&["test", "const.csv", "--stat", "ccor"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("degenerate"), "{}", stderr(&out));
}

#[test]
fn parse_errors_name_the_offending_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.csv"), "a,b\n1,2\n3,oops\n").unwrap();
    let out = dirdep(&["test", "bad.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("row 3") && msg.contains("oops"), "{msg}");
}

#[test]
fn sphere_ingestion_checks_norms_and_supports_renormalize() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x1,x2,x3,y1,y2,y3\n");
    // unit vectors for both sides, except one x row slightly off the sphere
    let rows = [
        (1.0, 0.0, 0.0, 0.0, 1.0, 0.0),
        (0.0, 1.0, 0.0, 1.0, 0.0, 0.0),
        (0.6, 0.8, 0.0, 0.0, 0.6, 0.8),
        (0.0, 0.0, 1.0, 0.8, 0.0, 0.6),
        (0.60001, 0.8, 0.0, 0.0, 0.0, 1.0),
    ];
    for r in rows {
        csv.push_str(&format!("{},{},{},{},{},{}\n", r.0, r.1, r.2, r.3, r.4, r.5));
    }
    fs::write(dir.path().join("sphere.csv"), csv).unwrap();
    let base = [
        "test",
        "sphere.csv",
        "--x-type",
        "sphere",
        "--y-type",
        "sphere",
        "--x-cols",
        "x1,x2,x3",
        "--y-cols",
        "y1,y2,y3",
        "-B",
        "20",
    ];
    let out = dirdep(&base, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("row 4"), "{}", stderr(&out));

    let mut with_renorm = base.to_vec();
    with_renorm.push("--renormalize");
    let out = dirdep(&with_renorm, dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("p-value"));
}

#[test]
fn power_runs_from_file_and_is_job_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "name": "cli-power",
        "n": 12,
        "alpha": 0.05,
        "replicates": 30,
        "bootstrap": 19,
        "mode": "full_bootstrap",
        "seed": 5,
        "statistics": ["dcor:energy:1", "ccor"],
        "models": ["VM(0,1)xVM(0,0.1)", "PB(1)"]
    }"#;
    fs::write(dir.path().join("study.cfg"), cfg).unwrap();

    let out = dirdep(
        &["power", "--config", "study.cfg", "--out", "a.csv", "--jobs", "1"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("seed = 5"));
    let csv_a = fs::read(dir.path().join("a.csv")).unwrap();
    let txt_a = fs::read(dir.path().join("a.txt")).unwrap();
    assert!(!txt_a.is_empty());

    let out = dirdep(
        &["power", "--config", "study.cfg", "--out", "b.csv", "--jobs", "4"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let csv_b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv_a, csv_b);

    // the csv parses and has one record per model x statistic
    let mut reader = csv::Reader::from_reader(csv_a.as_slice());
    assert_eq!(reader.records().count(), 4);
}

#[test]
fn builtin_presets_resolve_by_name() {
    let dir = tempfile::tempdir().unwrap();
    // malformed override of a preset name is still a config error, but the
    // name itself must resolve; use a nonexistent path to check the listing
    let out = dirdep(&["power", "--config", "not-a-preset"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("table1_desk"), "{}", stderr(&out));
}

#[test]
fn two_sample_statistic_runs_from_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dirdep(
        &["test", "--dataset", "wind", "--stat", "nk", "-B", "99", "--seed", "3", "--json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["statistic_name"], "nk:energy:1");
    // pooled permutation length
    assert_eq!(v["n"], 42);
}
