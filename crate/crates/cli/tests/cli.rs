use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn selmut(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selmut"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.conf");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn fig2_rate_law_and_weights() {
    let tmp = tempfile::tempdir().unwrap();
    let out = selmut(&["reproduce", "fig2", "--out", "fig2"], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let s = summary(&tmp.path().join("fig2"));
    let c = s["algebraic_fit"]["mean_scaled"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&c), "{c}");
    let checks = s["checks"].as_array().unwrap();
    assert!(checks
        .iter()
        .any(|c| c["name"] == "weights" && c["passed"] == true));
    assert!(tmp.path().join("fig2/snapshot_200.csv").exists());
}

#[test]
fn fig3_region_masses_converge_together() {
    let tmp = tempfile::tempdir().unwrap();
    let out = selmut(&["reproduce", "fig3", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("o/trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,rho,rho_1,rho_2");
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last[0], 200.0);
    assert!((last[2] - last[3]).abs() < 1e-10);
    assert!((last[2] - 0.5).abs() < 0.01);
}

#[test]
fn fig4_selects_the_flat_peak() {
    let tmp = tempfile::tempdir().unwrap();
    let out = selmut(&["reproduce", "fig4", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&tmp.path().join("o"));
    assert_eq!(s["prediction"]["selection"]["kind"], "single");
    assert_eq!(s["prediction"]["selection"]["peak"], 1);
    let near = s["concentration"]["fractions"][1].as_f64().unwrap();
    assert!(near >= 0.95, "{near}");
}

#[test]
fn predict_reports_weights() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = bundled("fig2.conf");
    let out = selmut(&["predict", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let w = &v["weights"]["weights"];
    assert!((w[0].as_f64().unwrap() - 0.2403).abs() < 1e-4);
    assert!((w[1].as_f64().unwrap() - 0.7597).abs() < 1e-4);
}

#[test]
fn eigen_of_constant_landscape() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "model = pde\nbeta = 1e-3\noffset = 0.7\nx_min = 0\nx_max = 1\nn_points = 101\nt_final = 1\ndt = 1e-3\n",
    );
    let out = selmut(
        &["eigen", "--config", cfg.to_str().unwrap(), "--out", "e"],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["summary"]["lambda"].as_f64().unwrap() + 0.7).abs() < 1e-12);
    let csv = fs::read_to_string(tmp.path().join("e/eigen.csv")).unwrap();
    assert!(csv.starts_with("beta,lambda,lambda2,gamma\n"));
    assert!(tmp.path().join("e/psi.csv").exists());
}

#[test]
fn unstable_step_exits_with_validation_status() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(bundled("fig4.conf"))
        .unwrap()
        .replace("beta = 1e-6", "beta = 1e-3");
    let cfg = write_config(tmp.path(), &text);
    let out = selmut(&["run", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("stability bound 0.0040"), "{err}");
}

#[test]
fn unknown_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "t_final = 1\nbump = 1, 0, 0.1\nseed = 4\n");
    let out = selmut(&["run", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key `seed`"));
}

#[test]
fn failed_check_exits_with_one_unless_disabled() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(bundled("fig2.conf"))
        .unwrap()
        .replace("t_final = 200", "t_final = 20");
    let cfg = write_config(tmp.path(), &text.replace("snapshot = 200", "snapshot = 20"));
    let cfg = cfg.to_str().unwrap();
    assert_eq!(
        selmut(&["run", "--config", cfg, "--out", "a"], tmp.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        selmut(
            &["run", "--config", cfg, "--out", "b", "--no-check"],
            tmp.path()
        )
        .status
        .code(),
        Some(0)
    );
    assert!(summary(&tmp.path().join("b"))["checks"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn runs_are_bitwise_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = bundled("fig1.conf");
    let cfg = cfg.to_str().unwrap();
    for dir in ["a", "b"] {
        assert_eq!(
            selmut(&["run", "--config", cfg, "--out", dir], tmp.path())
                .status
                .code(),
            Some(0)
        );
    }
    for name in ["trajectory.csv", "summary.json", "snapshot_50.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn sweep_is_independent_of_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = bundled("fig4.conf");
    let cfg = cfg.to_str().unwrap();
    let one = selmut(
        &["sweep-eps", "--config", cfg, "--out", "a", "--jobs", "1"],
        tmp.path(),
    );
    let three = selmut(
        &["sweep-eps", "--config", cfg, "--out", "b", "--jobs", "3"],
        tmp.path(),
    );
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    let csv = fs::read_to_string(tmp.path().join("a/eigen.csv")).unwrap();
    assert!(csv.starts_with("epsilon,lambda,lambda2,gamma,fraction_1,fraction_2\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn simulate_ide_overrides_the_model() {
    let tmp = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(bundled("fig3.conf"))
        .unwrap()
        .replace("t_final = 200", "t_final = 10")
        .replace("snapshot = 0, 50, 200", "snapshot = 10")
        .replace("check_", "# check_");
    let cfg = write_config(tmp.path(), &text);
    let out = selmut(
        &[
            "simulate-ide",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = summary(&tmp.path().join("o"));
    assert_eq!(s["model"], "ide");
    assert_eq!(s["beta"], 0.0);
}
