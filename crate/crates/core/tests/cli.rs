use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn slitwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slitwalk")).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn presets_are_listed() {
    let out = slitwalk(&["presets"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig3_w9", "fig5_double", "fig6_grover", "grover_diagonal"] {
        assert!(text.lines().any(|l| l == name), "{name}");
    }
}

#[test]
fn preset_run_writes_checksummed_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = slitwalk(&["run", "--preset", "fig3_w5", "--out", dir.path().to_str().unwrap(), "--filter-nonzero"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let name = f["path"].as_str().unwrap();
        let digest = hex::encode(Sha256::digest(fs::read(dir.path().join(name)).unwrap()));
        assert_eq!(f["sha256"].as_str().unwrap(), digest, "{name}");
    }
    assert!(manifest["assumptions"].as_array().unwrap().iter().any(|a| a.as_str().unwrap().starts_with("extremum-threshold")));
    assert!(read(dir.path(), "screen.csv").starts_with("n,intensity\n"));
    let extrema: serde_json::Value = serde_json::from_str(&read(dir.path(), "extrema.json")).unwrap();
    assert!(!extrema["maxima"].as_array().unwrap().is_empty());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = slitwalk(&["run", "--preset", "fig2", "--out", d.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["field.csv", "extrema.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert!(!a.path().join("screen.csv").exists());
}

#[test]
fn config_file_run_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("walk.cfg");
    fs::write(
        &cfg,
        "[walk]\ncoin = grover\nsteps = 30\n[barrier]\nx = 8\nslit = 2,1\nslit = -2,1\n[screen]\nx = 16\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = slitwalk(&["validate", cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("slit = -2,1.0"));

    let out_dir = dir.path().join("out");
    let out = slitwalk(&["run", "--config", cfg, "--out", out_dir.to_str().unwrap(), "--threshold", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = read(&out_dir, "manifest.json");
    assert!(manifest.contains("threshold = 0.1"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "[walk]\ncoin = hadamard\nsteps = 10\nflavour = 3\n").unwrap();
    let out = slitwalk(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4") && err.contains("flavour"), "{err}");

    let missing = dir.path().join("nope.cfg");
    assert_eq!(slitwalk(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(slitwalk(&["run", "--preset", "fig7"]).status.code(), Some(1));
    assert_eq!(slitwalk(&["run"]).status.code(), Some(1));
    assert_eq!(slitwalk(&["run", "--preset", "fig2", "--format", "json"]).status.code(), Some(1));
    assert_eq!(slitwalk(&["run", "--preset", "fig2", "--threshold", "1.5"]).status.code(), Some(1));
    assert_eq!(slitwalk(&["--help"]).status.code(), Some(0));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let target = blocker.join("sub");
    let out = slitwalk(&["run", "--preset", "free_hadamard", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
