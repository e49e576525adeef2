//! End-to-end checks of the binary: exit codes, output shape, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn cogbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cogbeam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cogbeam_cli_test_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const GOOD_CONFIG: &str = "\
m_t = 5\n\
m_r = 3\n\
m_1 = 2\n\
m_2 = 2\n\
d_1 = 1\n\
d_2 = 1\n\
alpha_1 = 0.45\n\
alpha_2 = 0.45\n\
p_1 = 100\n\
p_2 = 100\n\
p_cr = 100\n\
rho_0 = 1\n\
rho_1 = 1\n\
t_block = 1000\n\
tau_min = 10\n";

#[test]
fn list_names_all_experiments() {
    let out = cogbeam(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig2_capacity",
        "fig4_interference",
        "fig5_throughput_vs_tau",
        "fig6_max_throughput",
        "fig7_opt_tau",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn validate_accepts_good_config() {
    let path = scratch_dir().join("good.cfg");
    std::fs::write(&path, GOOD_CONFIG).unwrap();
    let out = cogbeam(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_rejects_bad_config_with_code_2() {
    let path = scratch_dir().join("bad.cfg");
    std::fs::write(&path, GOOD_CONFIG.replace("m_t = 5", "m_t = 0")).unwrap();
    let out = cogbeam(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
}

#[test]
fn validate_rejects_unknown_key_with_code_2() {
    let path = scratch_dir().join("unknown_key.cfg");
    std::fs::write(&path, format!("{GOOD_CONFIG}warp_factor = 9\n")).unwrap();
    let out = cogbeam(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_unknown_experiment_is_config_error() {
    let out = cogbeam(&["run", "fig9_dreams"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_zero_trials_is_config_error() {
    let out = cogbeam(&["run", "fig2_capacity", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_unknown_estimator_is_config_error() {
    let out = cogbeam(&["run", "fig2_capacity", "--trials", "2", "--estimator", "psychic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_missing_config_file_is_config_error() {
    let path = scratch_dir().join("does_not_exist.cfg");
    let out = cogbeam(&[
        "run",
        "fig2_capacity",
        "--trials",
        "2",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_csv_and_reruns_identically() {
    let dir = scratch_dir();
    let out_a = dir.join("fig2_a.csv");
    let out_b = dir.join("fig2_b.csv");
    for path in [&out_a, &out_b] {
        let out = cogbeam(&[
            "run",
            "fig2_capacity",
            "--trials",
            "3",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read_to_string(&out_a).unwrap();
    let b = std::fs::read_to_string(&out_b).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("# experiment = fig2_capacity\n"));
    assert!(a.contains("\nsweep_value,proposed,psvd\n"));
    // 11 sweep points -> metadata + header + 11 rows.
    assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 12);
    assert!(a.contains("# seed = 42"));
}

#[test]
fn run_with_config_override_reaches_stdout() {
    let path = scratch_dir().join("fig2_small.cfg");
    std::fs::write(&path, GOOD_CONFIG).unwrap();
    let out = cogbeam(&[
        "run",
        "fig2_capacity",
        "--trials",
        "2",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# config.m_t = 5"));
    assert!(text.ends_with('\n'));
}
