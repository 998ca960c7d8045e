//! Exercises the thin CLI end to end: exit codes, file outputs, and
//! byte determinism of the synth subcommand.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_inflow"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("inflow_cli_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn small_synth_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{"synth": {"n_features": 200, "months": 30, "cadence_switch_month": 15}}"#,
    )
    .unwrap();
    path
}

#[test]
fn synth_writes_five_files_deterministically() {
    let dir = temp_dir("synth");
    let (a, b) = (dir.join("a"), dir.join("b"));
    let config = small_synth_config(&dir);
    for out in [&a, &b] {
        let status = bin()
            .args(["synth", "--seed", "9", "--config"])
            .arg(&config)
            .arg("--out-dir")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let names = [
        "commits.csv",
        "trouble_reports.csv",
        "features.csv",
        "releases.csv",
        "ground_truth.json",
    ];
    assert_eq!(std::fs::read_dir(&a).unwrap().count(), names.len());
    for name in names {
        let left = std::fs::read(a.join(name)).unwrap();
        let right = std::fs::read(b.join(name)).unwrap();
        assert_eq!(left, right, "{name} differs between identical runs");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_accepts_generated_corpus() {
    let dir = temp_dir("validate");
    let config = small_synth_config(&dir);
    let corpus = dir.join("corpus");
    assert!(bin()
        .args(["synth", "--seed", "3", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&corpus)
        .status()
        .unwrap()
        .success());

    let output = bin()
        .arg("validate")
        .arg("--corpus-dir")
        .arg(&corpus)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("clean: true"), "{stdout}");
    assert!(stdout.contains("features:"), "{stdout}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_rejects_dangling_reference() {
    let dir = temp_dir("dangling");
    std::fs::write(
        dir.join("commits.csv"),
        "commit_id,feature_id,date,system,subsystem,files_changed,loc_added,loc_removed,loc_modified\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("trouble_reports.csv"),
        "tr_id,date_reported,release_id,importance_class\nt1,2020-01-01,R99,2\n",
    )
    .unwrap();
    std::fs::write(
        dir.join("features.csv"),
        "feature_id,completion_date,development_time_days\n",
    )
    .unwrap();
    std::fs::write(dir.join("releases.csv"), "release_id,release_date\nR1,2020-06-01\n").unwrap();

    let output = bin()
        .arg("validate")
        .arg("--corpus-dir")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("R99"), "diagnostic should name the reference: {stderr}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_requires_corpus_dir() {
    let output = bin().arg("validate").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let output = bin().args(["synth", "--no-such-flag"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn malformed_config_is_a_configuration_error() {
    let dir = temp_dir("badcfg");
    let config = dir.join("config.json");
    std::fs::write(&config, "{ not json").unwrap();
    let output = bin()
        .args(["synth", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn test1_runs_on_generated_corpus() {
    let dir = temp_dir("test1");
    let config = small_synth_config(&dir);
    let out = dir.join("out");
    let output = bin()
        .args(["test1", "--seed", "5", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    assert!(out.join("test1_report.json").exists());
    assert!(out.join("tables/test1_performance.csv").exists());
    assert!(out.join("charts/actual_vs_predicted.svg").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn test3_without_selected_model_is_a_configuration_error() {
    let dir = temp_dir("test3");
    let config = small_synth_config(&dir);
    let output = bin()
        .args(["test3", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("test2"), "{stderr}");
    std::fs::remove_dir_all(&dir).ok();
}
