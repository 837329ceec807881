//! End-to-end checks of the mixlab binary: subcommands, file outputs, and the
//! documented exit codes (0 pass, 1 failed check, 2 configuration error).

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mixlab"))
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mixlab_cli_{name}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_key_is_a_configuration_error() {
    let dir = temp_dir("badkey");
    let cfg = dir.join("bad.cfg");
    std::fs::write(&cfg, "not_a_real_key=1\n").unwrap();
    let out = bin().args(["mixing", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_writes_trajectory_and_fields() {
    let dir = temp_dir("simulate");
    let cfg = dir.join("sim.cfg");
    std::fs::write(
        &cfg,
        "grid_n=64\nflow=cellular\namplitude=0.3\nt_final=0.2\ndump_fields=1\nsnapshot_stride=8\n",
    )
    .unwrap();
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&dir)
        .args(["--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "time,l2_norm,l4_norm,dual_norm,accumulator");
    assert!(lines.clone().count() > 10);
    // first row starts at t = 0 with a finite dual norm
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,"), "first row {first}");
    let fields: Vec<_> = std::fs::read_dir(dir.join("fields")).unwrap().collect();
    assert!(!fields.is_empty(), "no MIXF checkpoints written");
}

#[test]
fn norm_subcommand_reads_mixf() {
    let dir = temp_dir("norm");
    let grid = mixcore::TorusGrid::new(2, 32, 1.0).unwrap();
    let field = mixcore::corpus::random_band_limited(&grid, 4, 1);
    let path = dir.join("field.mixf");
    mixlab::mixf::write_field(&path, &field).unwrap();
    for kind in ["dual", "besov", "logd"] {
        let out = bin()
            .args(["norm", "--kind", kind, "--input"])
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "kind {kind}");
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains(','), "no value printed for {kind}: {text}");
    }
}

#[test]
fn commutator_scan_emits_envelope_columns() {
    let dir = temp_dir("scan");
    let cfg = dir.join("scan.cfg");
    std::fs::write(
        &cfg,
        "grid_n=64\nflow=cellular\ndelta_lo=0.01\ndelta_hi=0.1\nper_decade=4\n",
    )
    .unwrap();
    let out = bin()
        .args(["commutator-scan", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("commutator_scan.csv")).unwrap();
    assert!(csv.starts_with("delta,norm_r,envelope_small,envelope_large"));
}

#[test]
fn kernel_csv_emits_symbol_and_cz_rows() {
    let dir = temp_dir("kernel");
    let out = bin()
        .args(["kernel-csv", "--kind", "log_averaged", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let sym = std::fs::read_to_string(dir.join("kernel_symbol.csv")).unwrap();
    assert!(sym.starts_with("xi_abs,value"));
    let cz = std::fs::read_to_string(dir.join("cz_report.csv")).unwrap();
    assert!(cz.starts_with("kernel,sup_xd_k,sup_xd1_grad_k,sup_symbol,scalar"));
}

#[test]
fn experiment_reports_are_written_and_pass() {
    let dir = temp_dir("experiment");
    let out = bin()
        .args(["besov_decay", "--out"])
        .arg(&dir)
        .args(["--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert!(report.contains("besov_decay:check_stable_under_range_doubling,1"));
    let fits = std::fs::read_to_string(dir.join("fit.csv")).unwrap();
    assert!(fits.starts_with("name,fitted_constant,residual,r2,flagged,config_digest"));
}

#[test]
fn failed_check_exits_one() {
    // an impossible tolerance through a legitimate config: mixing at an
    // over-large delta is a config error (2); a failing *check* needs a real
    // run — use regularity with an absurd calibration margin below 1 so the
    // frozen constant cannot bound fresh data
    let dir = temp_dir("fail");
    let cfg = dir.join("fail.cfg");
    std::fs::write(&cfg, "calibration_margin=0.01\n").unwrap();
    let out = bin()
        .args(["regularity", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("FAILED check"), "stderr: {text}");
}
