//! End-to-end runs of the `geomphase` binary.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_geomphase");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("GEOMPHASE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary_winding(o: &Output) -> i64 {
    let line = stdout(o);
    let line = line.lines().last().expect("summary line");
    let fields: Vec<&str> = line.split(' ').collect();
    assert_eq!(fields.len(), 3, "{line}");
    assert!(fields[1].starts_with("residual="));
    assert!(fields[2].starts_with("max_oracle_dev="));
    fields[1]["residual=".len()..].parse::<f64>().unwrap();
    fields[0].strip_prefix("winding=").unwrap().parse().unwrap()
}

fn write_circuit(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn simulate_preset_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = run(&[
        "simulate",
        "--circuit",
        "spqrs",
        "--n-steps",
        "4000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(summary_winding(&o), -1);
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "index,b1,bz,c,alpha_wrapped,alpha_unwrapped,oracle_unwrapped"
    );
    assert_eq!(lines.len(), 402);
    assert!(lines[1].starts_with("0,0.0000000000000000e0,1.0000000000000000e0,"));
    assert!(csv.ends_with('\n'));
}

#[test]
fn output_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..3)
        .map(|i| dir.path().join(format!("r{i}.csv")))
        .collect();
    let base = [
        "simulate",
        "--circuit",
        "efghe",
        "--n-steps",
        "2000",
        "--refine",
        "--out",
    ];
    let a = run(&[&base[..], &[paths[0].to_str().unwrap()]].concat());
    let b = run(&[&base[..], &[paths[1].to_str().unwrap(), "--threads", "1"]].concat());
    let c = Command::new(BIN)
        .args(base)
        .arg(paths[2].to_str().unwrap())
        .env("GEOMPHASE_THREADS", "2")
        .output()
        .unwrap();
    for o in [&a, &b, &c] {
        assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    }
    let first = std::fs::read(&paths[0]).unwrap();
    assert_eq!(first, std::fs::read(&paths[1]).unwrap());
    assert_eq!(first, std::fs::read(&paths[2]).unwrap());
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["simulate", "--circuit", "missing.json"][..],
        &["simulate", "--circuit", "abcda", "--no-such-flag"],
        &["simulate", "--circuit", "abcda", "--n-steps", "0"],
        &["simulate", "--circuit", "abcda", "--threads", "0"],
        &["monopole", "--circuit", "abcda", "--strength", "0.25"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(
            stderr(&o).trim().lines().count(),
            1,
            "{args:?}: {}",
            stderr(&o)
        );
    }
    let o = Command::new(BIN)
        .args(["simulate", "--circuit", "spqrs"])
        .env("GEOMPHASE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn circuit_file_needs_known_keys_and_beta() {
    let dir = tempfile::tempdir().unwrap();
    let strict = write_circuit(
        dir.path(),
        "extra.json",
        r#"{"vertices": [[2,1],[3,1],[3,-1],[2,-1]], "points_per_segment": 10, "beta": 20}"#,
    );
    assert_eq!(
        run(&["simulate", "--circuit", &strict]).status.code(),
        Some(2)
    );
    let null = write_circuit(
        dir.path(),
        "null.json",
        r#"{"vertices": [[2,1],[3,1],[3,-1],[2,-1]], "points_per_segment": 25}"#,
    );
    assert_eq!(
        run(&["simulate", "--circuit", &null]).status.code(),
        Some(2)
    );
    let o = run(&[
        "simulate",
        "--circuit",
        &null,
        "--beta",
        "20",
        "--n-steps",
        "4000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(summary_winding(&o), 0);
}

#[test]
fn circuit_through_singularity_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_circuit(
        dir.path(),
        "through.json",
        r#"{"vertices": [[0.5,0],[1.5,0],[1.5,0.5],[0.5,0.5]], "points_per_segment": 2}"#,
    );
    let o = run(&[
        "simulate",
        "--circuit",
        &path,
        "--beta",
        "20",
        "--n-steps",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(
        err.contains("OrthogonalStates") && err.contains("index=1"),
        "{err}"
    );
}

#[test]
fn oracle_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let o = run(&[
        "oracle",
        "--circuit",
        "abcda",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(summary_winding(&o), -1);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 401);
    assert_eq!(samples[0]["modulus_c"], 2.0);
    assert_eq!(v["meta"]["circuit"], "ABCDA");
}

#[test]
fn monopole_windings() {
    let thin = run(&["monopole", "--circuit", "abcda", "--strength", "-0.5"]);
    assert_eq!(thin.status.code(), Some(0), "{}", stderr(&thin));
    assert_eq!(summary_winding(&thin), 1);
    let thick = run(&[
        "monopole",
        "--circuit",
        "abcda",
        "--strength",
        "-0.5",
        "--string-thickness",
        "0.1",
    ]);
    assert_eq!(summary_winding(&thick), 0);
    let triple = run(&["monopole", "--circuit", "spqrs", "--strength", "-1.5"]);
    assert_eq!(summary_winding(&triple), 3);
}

#[test]
fn sweep_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(&[
        "sweep",
        "--b1-range",
        "-1.5:1.5",
        "--bz-range",
        "-0.5:0.5",
        "--grid",
        "7x3",
        "--beta",
        "20",
        "--n-steps",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("min_c="));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 22);
    // (-1, 0) has no starting eigenstate: c and phase are empty
    let degenerate = csv
        .lines()
        .find(|l| l.contains(",-1.0000000000000000e0,0.0000000000000000e0,"))
        .unwrap();
    assert!(degenerate.ends_with(",,,,"), "{degenerate}");
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("simulate"));
}
