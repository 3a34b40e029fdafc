//! End-to-end checks of the `glimps` binary and the CSV IO layer.

use std::path::{Path, PathBuf};
use std::process::Command;

use glimps_cli::io;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glimps"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("glimps-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn gen_then_detect_round_trip() {
    let dir = tmp_dir("gen-detect");
    let basis = dir.join("U.csv");
    let obs = dir.join("x.csv");
    let truth = dir.join("truth.csv");
    let out = dir.join("result.csv");
    let trace = dir.join("trace.csv");

    let status = bin()
        .args([
            "gen", "--d", "30", "--r", "3", "--p", "0.3", "--sigma", "0", "--seed", "11",
        ])
        .arg("--out-basis")
        .arg(&basis)
        .arg("--out-obs")
        .arg(&obs)
        .arg("--out-truth")
        .arg(&truth)
        .status()
        .unwrap();
    assert!(status.success());

    let status = bin()
        .args(["detect", "--removal", "0.3", "--time-limit", "20"])
        .arg("--basis")
        .arg(&basis)
        .arg("--obs")
        .arg(&obs)
        .arg("--out")
        .arg(&out)
        .arg("--trace")
        .arg(&trace)
        .status()
        .unwrap();
    assert!(status.success());

    // Detection output: one row per coordinate, labels match truth.
    let result_text = std::fs::read_to_string(&out).unwrap();
    let truth_text = std::fs::read_to_string(&truth).unwrap();
    let results: Vec<Vec<String>> = result_text
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(results.len(), 30);
    let mut agree = 0;
    for (res_row, truth_row) in results.iter().zip(truth_text.lines()) {
        let t: Vec<&str> = truth_row.split(',').collect();
        assert_eq!(res_row[0], t[0], "index columns align");
        let truth_label = if t[1] == "1" { "outlier" } else { "inlier" };
        if res_row[2] == truth_label {
            agree += 1;
        }
    }
    assert_eq!(agree, 30, "noiseless p=0.3 must classify perfectly");

    // Trace: one row per removed coordinate (30 * 0.3 = 9).
    let trace_text = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(trace_text.lines().count(), 9);
}

#[test]
fn detect_reads_paper_example_files() {
    let dir = tmp_dir("example1");
    let basis = dir.join("U.csv");
    let obs = dir.join("x.csv");
    let out = dir.join("res.csv");
    write(&basis, "1,0\n3,2\n5,4\n7,6\n9,8\n");
    write(&obs, "4\n14\n0\n34\n44\n");
    let output = bin()
        .args(["detect", "--removal", "0.2"])
        .arg("--basis")
        .arg(&basis)
        .arg("--obs")
        .arg(&obs)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let labels: Vec<&str> = text.lines().map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(labels, ["inlier", "inlier", "outlier", "inlier", "inlier"]);
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tmp_dir("determinism");
    let mk = |tag: &str| {
        let basis = dir.join(format!("U{tag}.csv"));
        let obs = dir.join(format!("x{tag}.csv"));
        let truth = dir.join(format!("t{tag}.csv"));
        let status = bin()
            .args(["gen", "--d", "12", "--r", "2", "--p", "0.5", "--sigma", "0.001", "--seed", "777"])
            .arg("--out-basis")
            .arg(&basis)
            .arg("--out-obs")
            .arg(&obs)
            .arg("--out-truth")
            .arg(&truth)
            .status()
            .unwrap();
        assert!(status.success());
        (
            std::fs::read_to_string(&basis).unwrap(),
            std::fs::read_to_string(&obs).unwrap(),
            std::fs::read_to_string(&truth).unwrap(),
        )
    };
    let a = mk("a");
    let b = mk("b");
    assert_eq!(a, b, "same seed must produce byte-identical files");
}

#[test]
fn bench_small_sweep_exit_code_and_schema() {
    let dir = tmp_dir("bench");
    let out = dir.join("rows.csv");
    let summary = dir.join("summary.csv");
    let status = bin()
        .args([
            "bench",
            "--sweep",
            "outliers",
            "--d",
            "14",
            "--r",
            "2",
            "--trials",
            "2",
            "--time-limit",
            "5",
            "--seed",
            "3",
            "--methods",
            "greedy,milp",
            "--p-grid",
            "0.2,0.4",
        ])
        .arg("--out")
        .arg(&out)
        .arg("--summary")
        .arg(&summary)
        .status()
        .unwrap();
    assert!(status.success(), "exit code 0 when every trial produced a row");

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), glimps_cli::bench::CSV_HEADER);
    let data: Vec<&str> = lines.collect();
    // 2 methods x 2 grid points x 2 trials.
    assert_eq!(data.len(), 8);
    for line in &data {
        assert_eq!(line.split(',').count(), 16, "fixed 16-column schema");
    }
    let summary_text = std::fs::read_to_string(&summary).unwrap();
    assert!(summary_text.starts_with(glimps_cli::bench::SUMMARY_HEADER));
    // 2 methods x 2 grid points.
    assert_eq!(summary_text.lines().count(), 5);
}

#[test]
fn vector_io_round_trip() {
    let dir = tmp_dir("io");
    let path = dir.join("v.csv");
    let v = glimps_core::Vector::from_slice(&[1.5, -2.25, 1e-9]).unwrap();
    io::write_vector_csv(&path, &v).unwrap();
    let back = io::read_vector_csv(&path).unwrap();
    assert_eq!(back.as_slice(), v.as_slice());
}

#[test]
fn matrix_io_rejects_ragged_rows() {
    let dir = tmp_dir("ragged");
    let path = dir.join("m.csv");
    write(&path, "1,2\n3\n");
    assert!(io::read_matrix_csv(&path).is_err());
}
