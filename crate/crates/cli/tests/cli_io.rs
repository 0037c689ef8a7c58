//! End-to-end checks of the experiment runner: artifact layout, byte-level
//! determinism, full-precision CSV round trips, oracle pass-through and
//! exit codes of the installed binary.

use std::fs;
use std::path::Path;
use std::process::Command;

use twopulse_cli::{parse_config, run_experiment};

/// A small, fast full-solver experiment (sharp line, short medium).
const TINY_FULL: &str = "\
[medium]
alpha2 = 1.0
beta2 = 0.0
delta_bar = 10.0
kappa = 1.0
z_entry = 0.0
z_exit = 0.5

[pulse_a]
shape = sech
area_pi = 2.0

[pulse_b]
shape = sech
area_pi = 0.005

[grid]
t_min = -8.0
t_max = 10.0
n_t = 361
z_min = 0.0
z_max = 0.5
n_z = 100

[run]
solver = full
stations = 3
area_stride = 20
";

const TINY_ANALYTIC: &str = "\
[medium]
alpha2 = 1.0
beta2 = 0.0
delta_bar = 10.0
kappa = 1.0

[pulse_a]
shape = sech
area_pi = 2.0

[pulse_b]
shape = sech
area_pi = 0.0

[grid]
t_min = -16.0
t_max = 8.0
n_t = 241
z_min = -2.0
z_max = 2.0
n_z = 40

[run]
solver = analytic
stations = 3
area_stride = 10
";

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn artifacts_written_and_deterministic() {
    let config = parse_config(TINY_FULL).unwrap();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    run_experiment(&config, Some(dir_a.path()), None, true).unwrap();
    run_experiment(&config, Some(dir_b.path()), None, true).unwrap();

    for name in ["snapshots.csv", "areas.csv", "report.txt"] {
        let a = read(dir_a.path(), name);
        let b = read(dir_b.path(), name);
        assert!(!a.is_empty(), "{name} is empty");
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.contains('\r'), "{name} must use LF line endings");
    }
    for i in 0..3 {
        let name = format!("station_{i:02}.svg");
        let svg = read(dir_a.path(), &name);
        assert!(svg.starts_with("<svg"), "{name} is not an svg");
        assert!(svg.contains("polyline"));
    }
}

#[test]
fn snapshots_csv_round_trips_at_full_precision() {
    let config = parse_config(TINY_FULL).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let artifacts = run_experiment(&config, Some(dir.path()), None, true).unwrap();

    let text = read(dir.path(), "snapshots.csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "z_kappa,t_over_tau,re_omega_a,im_omega_a,re_omega_b,im_omega_b,rho33_avg"
    );
    let n_t = artifacts.realized.grid.n_t;
    let mut rows = 0usize;
    for (row, line) in lines.enumerate() {
        let cols: Vec<f64> =
            line.split(',').map(|v| v.parse::<f64>().expect("float column")).collect();
        assert_eq!(cols.len(), 7);
        let station = &artifacts.run.stations[row / n_t];
        let i = row % n_t;
        assert_eq!(cols[2], station.fields.omega_a[i].re, "re_omega_a must round-trip");
        assert_eq!(cols[3], station.fields.omega_a[i].im);
        assert_eq!(cols[4], station.fields.omega_b[i].re);
        assert_eq!(cols[5], station.fields.omega_b[i].im);
        assert_eq!(cols[6], station.rho33_avg[i]);
        rows += 1;
    }
    assert_eq!(rows, artifacts.run.stations.len() * n_t);
}

#[test]
fn analytic_run_is_exact_pass_through() {
    let config = parse_config(TINY_ANALYTIC).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let artifacts = run_experiment(&config, Some(dir.path()), None, true).unwrap();

    let realized = config.realize().unwrap();
    let sol = twopulse::AnalyticSolution::new(
        realized.prep,
        config.tau,
        realized.quadrature.clone(),
    )
    .unwrap();
    let t_axis = realized.grid.t_axis();
    for snap in &artifacts.run.stations {
        for (i, &t) in t_axis.iter().enumerate() {
            let (ea, eb) = sol.fields(snap.z, t);
            assert_eq!(snap.fields.omega_a[i], ea);
            assert_eq!(snap.fields.omega_b[i], eb);
        }
    }
}

#[test]
fn verify_suite_passes_on_sane_config_and_flags_coarse_grids() {
    let good = parse_config(TINY_FULL).unwrap();
    let checks = twopulse_cli::verify::verify(&good);
    for c in &checks {
        assert!(c.pass, "{} failed: {}", c.name, c.detail);
    }

    // dt = 0.2 tau: the convergence check must fail with a resolution hint.
    let coarse_cfg = TINY_FULL.replace("n_t = 361", "n_t = 91");
    let coarse = parse_config(&coarse_cfg).unwrap();
    let checks = twopulse_cli::verify::verify(&coarse);
    let conv = checks.iter().find(|c| c.name == "time-step-convergence").unwrap();
    assert!(!conv.pass, "coarse grid unexpectedly passed: {}", conv.detail);
    assert!(conv.detail.contains("resolution hint"), "{}", conv.detail);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_twopulse");
    let dir = tempfile::tempdir().unwrap();

    // Config error: missing file.
    let out = Command::new(exe)
        .args(["simulate", "--config", "/nonexistent.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Config error: invalid contents, all violations reported.
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "[medium]\nalpha2 = 1.2\nbogus = 1\n").unwrap();
    let out = Command::new(exe)
        .args(["simulate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("alpha2 + beta2 must equal 1"), "stderr: {stderr}");
    assert!(stderr.contains("bogus"), "stderr: {stderr}");

    // Success path with artifacts.
    let cfg = dir.path().join("tiny.cfg");
    fs::write(&cfg, TINY_FULL).unwrap();
    let out_dir = dir.path().join("artifacts");
    let out = Command::new(exe)
        .args(["simulate", "--quiet", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("snapshots.csv").exists());
    assert!(out_dir.join("report.txt").exists());

    // Verification failure maps to exit 3.
    let coarse = dir.path().join("coarse.cfg");
    fs::write(&coarse, TINY_FULL.replace("n_t = 361", "n_t = 91")).unwrap();
    let out = Command::new(exe)
        .args(["verify", "--quiet", "--config"])
        .arg(&coarse)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.lines().any(|l| l.starts_with("FAIL\t")), "stdout: {stdout}");
}

#[test]
fn area_curves_subcommand_prints_csv() {
    let exe = env!("CARGO_BIN_EXE_twopulse");
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("areas.cfg");
    fs::write(
        &cfg,
        "[medium]\nalpha2 = 0.8\nbeta2 = 0.2\ndelta_bar = 10.0\nkappa = 1.0\n\
         [pulse_b]\nshape = sech\narea_pi = 0.005\n\
         [grid]\nz_min = -5\nz_max = 25\nn_z = 300\n",
    )
    .unwrap();
    let out = Command::new(exe).args(["areas", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "z_kappa,theta_a,theta_b,theta_total");
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    // Total area is 2 pi everywhere on the closed-form curves.
    assert!((first[3] - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    assert!(
        stdout.lines().last().unwrap().contains("parity at kappa*Z_T"),
        "missing transfer-length footer"
    );
}
