//! End-to-end checks of the compiled binary: exit codes, emitted files,
//! manifest hashing and bit-reproducibility.

use std::fs;
use std::path::Path;
use std::process::Command;

use opsim::ExperimentConfig;

fn opsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opsim"))
}

fn write_config(dir: &Path, config: &ExperimentConfig) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, config.to_json_string()).unwrap();
    path
}

fn small_scan_config() -> ExperimentConfig {
    let mut config = ExperimentConfig::default();
    config.phi_list = vec![0.0, std::f64::consts::PI / 2.0, std::f64::consts::PI];
    config.samples_per_phase = 5000;
    config.seed = 17;
    config
}

#[test]
fn validate_accepts_good_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &ExperimentConfig::default());
    let status = opsim()
        .args(["validate", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config.samples_per_phase = 0;
    let path = write_config(dir.path(), &config);
    for subcommand in ["validate", "kfit", "scan"] {
        let status = opsim()
            .arg(subcommand)
            .arg("--config")
            .arg(&path)
            .arg("--out")
            .arg(dir.path().join("out"))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(2), "subcommand {subcommand}");
    }
}

#[test]
fn malformed_json_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(&path, "{\"mean_n\": }").unwrap();
    let status = opsim()
        .args(["validate", "--config"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_code_three() {
    // vacuum input with K = 0 at φ = π: the operator annihilates the state
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config.mean_n = 0.0;
    config.k = 0.0;
    config.v = 1.0;
    config.phi_list = vec![std::f64::consts::PI];
    config.samples_per_phase = 100;
    let path = write_config(dir.path(), &config);
    let status = opsim()
        .args(["scan", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn scan_emits_listed_and_hashed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_scan_config();
    let path = write_config(dir.path(), &config);
    let out = dir.path().join("out");
    let status = opsim()
        .args(["scan", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), config.phi_list.len());
    for record in outputs {
        let name = record["path"].as_str().unwrap();
        let bytes = fs::read(out.join(name)).unwrap();
        let hash = {
            use sha2::{Digest, Sha256};
            let mut hasher = Sha256::new();
            hasher.update(&bytes);
            hex::encode(hasher.finalize())
        };
        assert_eq!(record["sha256"].as_str().unwrap(), hash, "file {name}");
    }
    // per-phase metadata present
    assert_eq!(manifest["phases"].as_array().unwrap().len(), 3);
    assert!(manifest["phases"][0]["success_weight"].is_number());
    assert!(manifest["phases"][0]["fringe_rate"].is_number());
    // beam-splitter subtraction diagnostic present for the default model
    assert!(manifest["subtraction_check"]["tv_distance_to_ideal"].is_number());
}

#[test]
fn identical_config_and_seed_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_scan_config();
    let path = write_config(dir.path(), &config);
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out_a, &out_b] {
        let status = opsim()
            .args(["scan", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for entry in fs::read_dir(&out_a).unwrap() {
        let name = entry.unwrap().file_name();
        let a = fs::read(out_a.join(&name)).unwrap();
        let b = fs::read(out_b.join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between reruns");
    }
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_scan_config();
    let path = write_config(dir.path(), &config);
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, seed) in [(&out_a, "17"), (&out_b, "18")] {
        let status = opsim()
            .args(["scan", "--config"])
            .arg(&path)
            .arg("--out")
            .arg(out)
            .args(["--seed", seed])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = fs::read(out_a.join("phase_00.csv")).unwrap();
    let b = fs::read(out_b.join("phase_00.csv")).unwrap();
    assert_ne!(a, b, "different seeds must change the data");
}

#[test]
fn zero_coherence_makes_all_phases_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_scan_config();
    config.v = 0.0;
    config.phi_list = vec![0.0, std::f64::consts::PI];
    let path = write_config(dir.path(), &config);
    let out = dir.path().join("out");
    let status = opsim()
        .args(["scan", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let h0 = fs::read(out.join("phase_00.csv")).unwrap();
    let h1 = fs::read(out.join("phase_01.csv")).unwrap();
    assert_eq!(h0, h1, "v = 0 histograms must coincide bin by bin");
}

#[test]
fn tomo_smoke_run_emits_reconstructions() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::default();
    config.seed = 5;
    let path = write_config(dir.path(), &config);
    let out = dir.path().join("out");
    let status = opsim()
        .args(["tomo", "--phi", "0", "--samples", "4000", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for file in [
        "signal_histogram.csv",
        "reference_histogram.csv",
        "recon_corrected.json",
        "recon_uncorrected.json",
        "wigner_corrected.csv",
        "wigner_uncorrected.csv",
        "manifest.json",
    ] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["levels"], 11);
    let recon: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("recon_corrected.json")).unwrap())
            .unwrap();
    assert_eq!(recon["state"].as_array().unwrap().len(), 11);
}
