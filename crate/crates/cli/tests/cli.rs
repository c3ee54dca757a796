//! End-to-end runs of every subcommand against a temp directory.

use std::path::Path;
use std::process::Command;

fn jane() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jane"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn generate_into(dir: &Path) {
    run_ok(jane().args([
        "generate",
        "--n",
        "120",
        "--alpha",
        "0.5",
        "--seed",
        "7",
        "--out",
        dir.to_str().unwrap(),
    ]));
}

#[test]
fn generate_writes_canonical_files() {
    let dir = tempfile::tempdir().unwrap();
    generate_into(dir.path());
    for name in [
        "edges.txt",
        "X.csv",
        "y.csv",
        "splits.json",
        "meta.json",
        "manifest.json",
    ] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
}

#[test]
fn train_writes_report_and_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    generate_into(dir.path());
    let report = dir.path().join("report.json");
    let ckpt = dir.path().join("model.bin");
    let stdout = run_ok(jane().args([
        "train",
        "--data",
        dir.path().to_str().unwrap(),
        "--variant",
        "jane-nu",
        "--epochs",
        "40",
        "--seed",
        "3",
        "--report",
        report.to_str().unwrap(),
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]));
    assert!(stdout.contains("test accuracy"));

    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(body["epochs"].as_array().unwrap().len(), 40);
    assert!(body["test_acc"].as_f64().unwrap() > 0.5);
    for key in ["epoch", "loss", "adj_nll", "obj", "train_acc", "val_acc"] {
        assert!(
            body["epochs"][0].get(key).is_some(),
            "epoch record missing {key}"
        );
    }
    assert!(ckpt.exists());
    let bytes = std::fs::read(&ckpt).unwrap();
    assert_eq!(&bytes[..8], b"JANECKP1");
}

#[test]
fn baseline_reports_label_propagation() {
    let dir = tempfile::tempdir().unwrap();
    generate_into(dir.path());
    let report = dir.path().join("lp.json");
    run_ok(jane().args([
        "baseline",
        "--data",
        dir.path().to_str().unwrap(),
        "--method",
        "lp",
        "--report",
        report.to_str().unwrap(),
    ]));
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(body["method"], "lp");
    assert!(body["test_acc"].as_f64().unwrap() >= 0.0);
}

#[test]
fn eigs_writes_csv_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.txt");
    // Path graph on 3 nodes: nontrivial eigenvalues 1 and 3.
    std::fs::write(&edges, "# a path\n0 1\n1 2\n").unwrap();
    let out = dir.path().join("eigs.csv");
    run_ok(jane().args([
        "eigs",
        edges.to_str().unwrap(),
        "--k",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4); // eigenvalue row + one row per node
    let vals: Vec<f64> = lines[0].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((vals[0] - 1.0).abs() < 1e-9);
    assert!((vals[1] - 3.0).abs() < 1e-9);
}

#[test]
fn sweep_runs_spec_and_renders_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = serde_json::json!({
        "alphas": [0.5],
        "train_fracs": [0.1],
        "methods": ["jane-nu", "lp"],
        "repeats": 2,
        "val_frac": 0.2,
        "synth": {
            "n": 80, "d": 2, "k": 2, "num_classes": 4,
            "alpha": 0.5, "scale_sq_gen": 1.0, "seed": 0
        },
        "train": {
            "epochs": 30, "lr_w": 0.005, "lr_u": 1e-4, "dropout": 0.2,
            "weight_decay": 5e-2, "k": 2, "scale_sq": 0.01, "hidden": 16,
            "variant": "jane", "seed": 0, "early_stop_patience": null,
            "u_update_every": 1, "optimizer": "adam"
        }
    });
    let spec_path = dir.path().join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    let out_dir = dir.path().join("results");
    run_ok(jane().args([
        "sweep",
        "--spec",
        spec_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]));
    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4); // header + 2 methods x 2 repeats
    assert!(out_dir.join("summary.json").exists());
    assert!(out_dir.join("accuracy_alpha_0.5.svg").exists());
}

#[test]
fn unknown_method_fails_with_error() {
    let dir = tempfile::tempdir().unwrap();
    generate_into(dir.path());
    let out = jane()
        .args([
            "baseline",
            "--data",
            dir.path().to_str().unwrap(),
            "--method",
            "gcn",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown baseline method"));
}
