//! End-to-end checks of the uik binary: exit codes, file formats, config
//! precedence, and artifact determinism.

use std::path::Path;
use std::process::{Command, Output};

fn uik(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uik"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(
        uik(&["kernel", "--family", "hardy", "-N", "10"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        uik(&["kernel", "--family", "bergman", "-N", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(uik(&["kernel", "-N", "10"]).status.code(), Some(1));
    assert_eq!(
        uik(&["kernel", "--family", "nosuch", "-N", "10"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(uik(&["--definitely-not-a-flag"]).status.code(), Some(1));
    assert_eq!(uik(&["--help"]).status.code(), Some(0));
}

#[test]
fn kernel_csv_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("table.csv");
    let output = uik(&[
        "kernel",
        "--family",
        "dirichlet",
        "-N",
        "6",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.starts_with("n,a_n,b_n"));
    let file = std::fs::read_to_string(&out).unwrap();
    assert_eq!(file.trim_end(), stdout.trim_end());
    // 17-significant-digit floats round-trip.
    let second_line = file.lines().nth(1).unwrap();
    assert!(second_line.starts_with("0,1.0000000000000000e0"));
}

#[test]
fn kernel_spec_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    write(&spec, r#"{"family": "h_s", "s": -1.0, "d": 1, "N": 12}"#);
    let output = uik(&["kernel", "--spec", spec.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("\"N\": 12"));
}

#[test]
fn config_file_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    write(&config, r#"{"family": "bergman", "N": 10}"#);
    // Config alone: bergman fails CNP.
    let output = uik(&["kernel", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    // Explicit flag beats the config family.
    let output = uik(&[
        "kernel",
        "--family",
        "hardy",
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn pick_problem_modes() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    write(
        &problem,
        r#"{"d":1, "nodes":[[0.0,0.0],[0.5,0.0]], "r":1, "targets":[[[0.0,0.0]],[[0.4,0.0]]]}"#,
    );
    let output = uik(&[
        "pick",
        "--problem",
        problem.to_str().unwrap(),
        "--family",
        "hardy",
        "-N",
        "400",
    ]);
    assert_eq!(output.status.code(), Some(0));

    write(
        &problem,
        r#"{"d":1, "nodes":[[0.0,0.0],[0.5,0.0]], "r":1, "targets":[[[0.0,0.0]],[[0.6,0.0]]]}"#,
    );
    let output = uik(&[
        "pick",
        "--problem",
        problem.to_str().unwrap(),
        "--family",
        "hardy",
        "-N",
        "400",
    ]);
    assert_eq!(output.status.code(), Some(2));

    let output = uik(&[
        "pick",
        "--problem",
        problem.to_str().unwrap(),
        "--family",
        "hardy",
        "-N",
        "400",
        "--sweep",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let threshold = report["threshold"].as_f64().unwrap();
    // Targets (0, 0.6): feasibility boundary at t = 0.5/0.6.
    assert!((threshold - 0.5 / 0.6).abs() < 1e-6);
}

#[test]
fn pick_csv_verdict_rows() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("problem.json");
    write(
        &problem,
        r#"{"d":1, "nodes":[[0.0,0.0],[0.5,0.0]], "r":1, "targets":[[[0.0,0.0]],[[0.4,0.0]]]}"#,
    );
    let output = uik(&[
        "pick",
        "--problem",
        problem.to_str().unwrap(),
        "--family",
        "hardy",
        "-N",
        "400",
        "--format",
        "csv",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.starts_with("operation,family,nodes,min_eigenvalue,scale,tolerance,verdict"));
    assert!(stdout.contains(",psd"));
}

#[test]
fn pick_requires_input() {
    assert_eq!(uik(&["pick", "--family", "hardy"]).status.code(), Some(1));
}

#[test]
fn dilate_bergman_obstruction_exits_two() {
    let output = uik(&[
        "dilate",
        "--family",
        "bergman",
        "--shift-family",
        "hardy",
        "-N",
        "2",
        "-d",
        "1",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("not psd"), "stderr: {}", stderr);
}

#[test]
fn dilate_with_ideal_reports_containment() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = dir.path().join("ideal.json");
    write(
        &ideal,
        r#"{"d":2, "generators":[{"degree":2, "coeffs":{"(1,1)":1.0}}]}"#,
    );
    let output = uik(&[
        "dilate",
        "--family",
        "da",
        "-d",
        "2",
        "-N",
        "3",
        "--scale",
        "0.9",
        "--ideal",
        ideal.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let cert: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(cert["valid"].as_bool().unwrap());
    assert!(cert["ideal_containment_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn dilate_reads_tuple_files() {
    let dir = tempfile::tempdir().unwrap();
    let tuple = dir.path().join("tuple.txt");
    // A single 2x2 nilpotent Jordan block, scaled later by --scale.
    write(&tuple, "1 2\n0,0 0,0\n1,0 0,0\n");
    let output = uik(&[
        "dilate",
        "--family",
        "hardy",
        "-d",
        "1",
        "-N",
        "4",
        "--tuple",
        tuple.to_str().unwrap(),
        "--scale",
        "0.9",
    ]);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn model_checks_run() {
    for check in [
        "projection",
        "lemma91",
        "defect",
        "commutators",
        "toeplitz",
        "norms",
        "technical",
    ] {
        let output = uik(&[
            "model",
            "--family",
            "dirichlet",
            "-d",
            "1",
            "-N",
            "4",
            "--check",
            check,
        ]);
        assert_eq!(output.status.code(), Some(0), "check {} failed", check);
    }
    assert_eq!(
        uik(&[
            "model",
            "--family",
            "dirichlet",
            "-N",
            "4",
            "--check",
            "nosuch"
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn report_is_byte_identical_across_runs() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let output = uik(&[
            "report",
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            "11",
        ]);
        assert_eq!(output.status.code(), Some(0));
    }
    for file in ["kernel_coefficients.csv", "verdicts.csv", "report.md"] {
        let a = std::fs::read(dir_a.path().join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join(file)).unwrap();
        assert_eq!(a, b, "{} differs between identical runs", file);
    }
}
