use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use urep::cli::{emit, execute, parse_config, parse_config_str, ConfigError, Scheme};

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn shipped_configs() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(configs_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn urep(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_urep")).args(args).output().unwrap()
}

fn config_text(name: &str) -> String {
    fs::read_to_string(configs_dir().join(name)).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn shipped_configs_round_trip_through_emit() {
    let configs = shipped_configs();
    assert!(configs.len() >= 5);
    for path in configs {
        let rc = parse_config(&path).unwrap();
        let again = parse_config_str(&emit(&rc), "emitted").unwrap();
        assert_eq!(again, rc, "{}", path.display());
    }
}

#[test]
fn validation_errors_name_fields() {
    let text = config_text("unit_ball_proximal.conf").replace("problem.k = 1", "problem.k = -1");
    let ConfigError::Validation(errs) = parse_config_str(&text, "x").unwrap_err() else { panic!() };
    assert!(errs.iter().any(|e| e.contains("problem.k")), "{errs:?}");

    let text = config_text("unit_ball_proximal.conf").replace("scheme = proximal", "scheme = newton");
    let err = parse_config_str(&text, "x").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("newton") && msg.contains("proximal, inertial, explicit, descent"), "{msg}");
}

#[test]
fn bad_config_exits_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let text = config_text("unit_ball_proximal.conf").replace("problem.set.radius = 1", "problem.set.radius = big");
    let path = write_config(dir.path(), "bad.conf", &text);
    let out = urep(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("problem.set.radius") && err.contains(":9:"), "{err}");
}

#[test]
fn traces_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["annulus_inertial.conf", "ball10_descent.conf", "box_explicit.conf"] {
        let cfg = configs_dir().join(name);
        let mut csv = Vec::new();
        for run in ["a", "b"] {
            let out_dir = dir.path().join(run);
            let out = urep(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap(), "--seed", "7"]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            csv.push(fs::read(out_dir.join("trace.csv")).unwrap());
        }
        assert_eq!(csv[0], csv[1], "{name}");
    }
}

#[test]
fn csv_and_summary_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("unit_ball_proximal.conf");
    let out = urep(&["run", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,step_norm,residual,gap,t"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "0.0000000000000000e0");
    assert_eq!(&first[3..], &["", ""]);

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "Converged");
    assert_eq!(summary["fejer_passed"], true);
    let spacing = 2.0 / 400.0;
    assert!(summary["oracle_distance"].as_f64().unwrap() <= 2.0 * spacing);
    for key in ["iterations", "final_point", "final_residual", "final_gap", "oracle_point"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
}

#[test]
fn max_outer_one_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = config_text("box_explicit.conf").replace("solver.max_outer = 2000", "solver.max_outer = 1");
    let path = write_config(dir.path(), "short.conf", &text);
    let out = urep(&["run", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let csv = fs::read_to_string(dir.path().join("o/trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn descent_trace_gap_column() {
    let rc = parse_config(&configs_dir().join("ball10_descent.conf")).unwrap();
    assert_eq!(rc.scheme, Scheme::Descent);
    let out = execute(&rc).unwrap();
    let csv = urep::cli::trace_csv(&out.trace);
    let gaps: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(gaps, vec![0.125, 0.0]);
    let t: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(t, vec!["", "1.0000000000000000e0"]);
}

#[test]
fn oracle_disagreement_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let text = config_text("unit_ball_proximal.conf").replace("oracle.resolution = 400", "oracle.resolution = 40\noracle.tolerance = 1e-12")
        .replace("start = 0, -1", "start = 0, -1\nsolver.outer_tol = 1e-3");
    let path = write_config(dir.path(), "strict.conf", &text);
    let out = urep(&["run", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn oracle_flag_adds_cross_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs_dir().join("box_explicit.conf");
    let out = urep(&["run", cfg.to_str().unwrap(), "--oracle", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!(summary["oracle_distance"].as_f64().unwrap() <= 2.0 * 2.0 / 400.0);
}

#[test]
fn suite_runs_every_config_into_its_own_directory() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite");
    fs::create_dir(&suite).unwrap();
    for name in ["ball10_descent.conf", "box_explicit.conf", "norm_difference_halfspace.conf"] {
        fs::copy(configs_dir().join(name), suite.join(name)).unwrap();
    }
    let out_dir = dir.path().join("out");
    let out = urep(&["--suite", suite.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for stem in ["ball10_descent", "box_explicit", "norm_difference_halfspace"] {
        assert!(out_dir.join(stem).join("trace.csv").is_file(), "{stem}");
        assert!(out_dir.join(stem).join("summary.json").is_file(), "{stem}");
    }
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = configs_dir().join("box_explicit.conf");
    let out = urep(&["run", cfg.to_str().unwrap(), "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
