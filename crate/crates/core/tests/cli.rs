use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hermite_rolle::report::parse_csv_columns;

const OUTPUTS: [&str; 5] = [
    "config.echo",
    "trajectory.csv",
    "error_curves.csv",
    "fits.json",
    "integration.json",
];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermite-rolle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn default_run_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let out_a = run_into(a.path(), &[]);
    let out_b = run_into(b.path(), &[]);
    assert!(out_a.status.success(), "{}", String::from_utf8_lossy(&out_a.stderr));
    assert!(out_b.status.success());
    assert_eq!(out_a.stdout, out_b.stdout);
    for name in OUTPUTS {
        let left = fs::read(a.path().join(name)).unwrap();
        let right = fs::read(b.path().join(name)).unwrap();
        assert!(left == right, "{name} differs between runs");
    }
}

#[test]
fn trajectory_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_into(dir.path(), &["--steps", "2000", "--no-spline"]).status.success());
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let (header, cols) = parse_csv_columns(&text).unwrap();
    assert_eq!(header, ["x", "xi"]);
    assert_eq!(cols[0].len(), 2001);
    let fits = json(&dir.path().join("fits.json"));
    let accepted = fits["accepted_xi_z"].as_f64().unwrap();
    assert_eq!(cols[1][0], accepted);

    let curves = fs::read_to_string(dir.path().join("error_curves.csv")).unwrap();
    let (header, cols) = parse_csv_columns(&curves).unwrap();
    assert_eq!(header, ["x", "delta_true", "delta_model", "difference"]);
    for ((t, m), d) in cols[1].iter().zip(&cols[2]).zip(&cols[3]) {
        assert_eq!(*d, t - m);
    }
}

#[test]
fn polynomial_target_is_reported_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_into(dir.path(), &["--function", "cubic", "--nodes", "0,1", "--steps", "1000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fits = json(&dir.path().join("fits.json"));
    assert_eq!(fits["degenerate"], serde_json::Value::Bool(true));
}

#[test]
fn bad_config_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour = blue\n").unwrap();
    let out = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["run", "--function", "tan"]).status.code(), Some(2));
    assert_eq!(run(&["run", "--nodes", "1,0"]).status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_with_code_3() {
    // e^x has no interior Rolle value matching the true error this close to a node.
    let out = run(&["run", "--function", "exp", "--nodes", "0,1", "--steps", "1000"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# short run\nsteps = 500\ndegrees = 5\nspline = false\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "3000",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let echo = fs::read_to_string(out_dir.join("config.echo")).unwrap();
    assert!(echo.contains("steps = 3000"), "{echo}");
    assert!(echo.contains("degrees = 5\n"), "{echo}");
    assert!(echo.contains("spline = false"), "{echo}");
}

#[test]
fn functions_lists_builtins() {
    let out = run(&["functions"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "exp-sin"));
}
