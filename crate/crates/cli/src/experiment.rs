//! Experiment orchestration: realize a config, run the selected solver and
//! write the artifact directory.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use twopulse::diagnostics::{
    absolute_area, fit_sech, manley_rowe_residual, peak_count, poynting_residual, pulse_area,
    theoretical_areas, transfer_length, PoyntingReport,
};
use twopulse::{
    analytic_run, compute_kappa_delta, even_stations, propagate, reduced_propagate,
    sample_input_pulse, AnalyticSolution, FieldState, Propagation,
    PropagationCoefficients, Scheme,
};

use crate::config::{ExperimentConfig, Realized, SolverKind};
use crate::error::CliError;
use crate::output;

/// Everything an experiment produced, for inspection by callers and tests.
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub run: Propagation,
    pub coeffs: PropagationCoefficients,
    pub realized: Realized,
    pub entry: FieldState,
    pub warnings: Vec<String>,
}

fn entry_fields(
    config: &ExperimentConfig,
    realized: &Realized,
    sol: Option<&AnalyticSolution>,
    warnings: &mut Vec<String>,
) -> FieldState {
    let t_axis = realized.grid.t_axis();
    match sol {
        Some(sol) => FieldState {
            omega_a: t_axis.iter().map(|&t| sol.fields(config.z_min, t).0).collect(),
            omega_b: t_axis.iter().map(|&t| sol.fields(config.z_min, t).1).collect(),
            z_position: config.z_min,
        },
        None => {
            let a = sample_input_pulse(&config.pulse_a, &t_axis);
            let b = sample_input_pulse(&config.pulse_b, &t_axis);
            if let Some(w) = a.truncation_warning {
                warnings.push(format!("pump: {w}"));
            }
            if let Some(w) = b.truncation_warning {
                warnings.push(format!("stokes: {w}"));
            }
            FieldState { omega_a: a.envelope, omega_b: b.envelope, z_position: config.z_min }
        }
    }
}

/// Run the configured experiment and write snapshots.csv, areas.csv,
/// report.txt and per-station SVG plots into the output directory.
pub fn run_experiment(
    config: &ExperimentConfig,
    out_override: Option<&Path>,
    stations_override: Option<usize>,
    quiet: bool,
) -> Result<RunArtifacts, CliError> {
    let realized = config.realize().map_err(|e| CliError::Config(vec![e]))?;
    let coeffs = compute_kappa_delta(&realized.prep, config.tau, &realized.quadrature)
        .map_err(CliError::Numerical)?;
    let mut warnings = Vec::new();

    let n_stations = stations_override.unwrap_or(config.stations);
    let stations = even_stations(config.n_z, n_stations);
    let solution = match config.solver {
        SolverKind::Analytic => Some(
            AnalyticSolution::new(realized.prep, config.tau, realized.quadrature.clone())
                .map_err(CliError::Numerical)?,
        ),
        _ => None,
    };
    let entry = entry_fields(config, &realized, solution.as_ref(), &mut warnings);

    if !quiet {
        eprintln!(
            "running {} solver: {} z-steps, {} time samples, {} detuning classes",
            config.solver.name(),
            config.n_z,
            config.n_t,
            realized.quadrature.len()
        );
    }
    let run = match config.solver {
        SolverKind::Full => propagate(
            &entry,
            &realized.prep,
            &realized.grid,
            Scheme::Midpoint,
            &stations,
            config.substeps,
            config.area_stride,
        )
        .map_err(CliError::Numerical)?,
        SolverKind::Adiabatic => reduced_propagate(
            &entry,
            &realized.prep,
            &realized.grid,
            &stations,
            config.substeps,
            config.area_stride,
        )
        .map_err(CliError::Numerical)?,
        SolverKind::Analytic => {
            analytic_run(solution.as_ref().unwrap(), &realized.grid, &stations, config.area_stride)
        }
    };

    let out_dir = out_override
        .map(|p| p.to_path_buf())
        .or_else(|| config.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out_dir).map_err(CliError::Io)?;

    let artifacts = RunArtifacts { out_dir, run, coeffs, realized, entry, warnings };
    write_artifacts(config, &artifacts)?;
    if !quiet {
        eprintln!("artifacts written to {}", artifacts.out_dir.display());
    }
    Ok(artifacts)
}

fn write_artifacts(config: &ExperimentConfig, art: &RunArtifacts) -> Result<(), CliError> {
    let grid = &art.realized.grid;
    let t_axis = grid.t_axis();
    let kappa = art.coeffs.kappa;

    output::write_snapshots_csv(&art.out_dir.join("snapshots.csv"), &art.run.stations, &t_axis, kappa)
        .map_err(CliError::Io)?;

    // Reference area curves: for slab runs shift the curve so the seed
    // area is met at the entry face; the analytic solver uses the bare
    // curve (its transfer is centred at Z = 0 by construction).
    let seed = pulse_area(&art.entry.omega_b, &t_axis);
    let shift = match config.solver {
        SolverKind::Analytic => 0.0,
        _ => {
            let zt = if art.realized.prep.inversion().abs() > 1e-14
                && seed > 0.0
                && seed < 2.0 * PI
            {
                transfer_length(&art.realized.prep, &art.coeffs, seed).ok()
            } else {
                None
            };
            match zt {
                Some(zt) => config.z_entry.unwrap_or(config.z_min) + zt,
                None => 0.0,
            }
        }
    };
    output::write_areas_csv(
        &art.out_dir.join("areas.csv"),
        &art.run.areas,
        &art.realized.prep,
        &art.coeffs,
        shift,
        kappa,
    )
    .map_err(CliError::Io)?;

    for (i, snap) in art.run.stations.iter().enumerate() {
        let path = art.out_dir.join(format!("station_{i:02}.svg"));
        output::write_station_svg(&path, snap, &t_axis, kappa).map_err(CliError::Io)?;
    }

    let report = build_report(config, art);
    fs::write(art.out_dir.join("report.txt"), report).map_err(CliError::Io)?;
    Ok(())
}

fn build_report(config: &ExperimentConfig, art: &RunArtifacts) -> String {
    use std::fmt::Write as _;
    let mut s = String::new();
    let grid = &art.realized.grid;
    let t_axis = grid.t_axis();
    let prep = &art.realized.prep;
    let kappa = art.coeffs.kappa;

    if let Some(label) = &config.label {
        let _ = writeln!(s, "label: {label}");
    }
    let _ = writeln!(s, "solver: {}", config.solver.name());
    let _ = writeln!(
        s,
        "medium: alpha2 = {}, beta2 = {}, inversion = {}, delta_bar = {}",
        prep.alpha2,
        prep.beta2,
        prep.inversion(),
        prep.delta_bar
    );
    let _ = writeln!(
        s,
        "coupling: mu = {:.6e}; soliton width tau = {}; kappa = {:.6e}, dispersive delta = {:.6e} (delta/kappa = {:.4})",
        prep.mu,
        config.tau,
        kappa,
        art.coeffs.delta_disp,
        art.coeffs.delta_disp / kappa
    );
    let _ = writeln!(
        s,
        "grid: T in [{}, {}] x {}, Z in [{}, {}] x {} steps, {} detuning classes",
        grid.t_min, grid.t_max, grid.n_t, grid.z_min, grid.z_max, grid.n_z,
        grid.doppler.len()
    );
    for w in &art.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s);

    let _ = writeln!(s, "stations:");
    let _ = writeln!(
        s,
        "  idx  kappa*Z      |int W_a dT|  |int W_b dT|  int |W_a| dT  int |W_b| dT  peak|W_a|  peak|W_b|  peaks(a,b)"
    );
    for (i, snap) in art.run.stations.iter().enumerate() {
        let f = &snap.fields;
        let _ = writeln!(
            s,
            "  {i:3}  {:10.4}  {:12.6}  {:12.6}  {:12.6}  {:12.6}  {:9.4}  {:9.4}  ({}, {})",
            kappa * snap.z,
            pulse_area(&f.omega_a, &t_axis),
            pulse_area(&f.omega_b, &t_axis),
            absolute_area(&f.omega_a, &t_axis),
            absolute_area(&f.omega_b, &t_axis),
            f.omega_a.iter().map(|v| v.norm()).fold(0.0, f64::max),
            f.omega_b.iter().map(|v| v.norm()).fold(0.0, f64::max),
            peak_count(&f.omega_a, 0.1),
            peak_count(&f.omega_b, 0.1),
        );
    }
    let _ = writeln!(s);

    // Conservation diagnostics.
    match config.solver {
        SolverKind::Adiabatic => {
            let mr = manley_rowe_residual(&art.entry.flux(), &art.run.stations);
            let _ = writeln!(s, "manley-rowe residual (max pointwise flux drift): {mr:.3e}");
        }
        _ => {
            let reports = poynting_residual(&art.run.stations, grid.dt(), prep.mu);
            if reports.is_empty() {
                let _ = writeln!(
                    s,
                    "flux-conservation check: no interior stations with recorded neighbours"
                );
            } else {
                let _ = writeln!(
                    s,
                    "flux-conservation residuals (d_Z flux + 2 mu d_T <rho_33>):"
                );
                let _ = writeln!(
                    s,
                    "  kappa*Z     per-step budget   pointwise cancellation   |dZ term|max   |dT term|max"
                );
                for PoyntingReport {
                    z,
                    integrated_per_step,
                    normalized_max,
                    dz_term_max,
                    dt_term_max,
                    ..
                } in &reports
                {
                    let _ = writeln!(
                        s,
                        "  {:9.4}  {:15.3e}  {:21.3e}  {:13.3e}  {:13.3e}",
                        kappa * z, integrated_per_step, normalized_max, dz_term_max, dt_term_max
                    );
                }
            }
            let _ = writeln!(s, "fluence drift across the run: {:.3e}", art.run.fluence_drift);
        }
    }
    let _ = writeln!(s);

    // Transfer-length prediction vs measurement.
    let seed = pulse_area(&art.entry.omega_b, &t_axis);
    if prep.inversion().abs() > 1e-14 && seed > 0.0 && seed < 2.0 * PI {
        if let Ok(zt) = transfer_length(prep, &art.coeffs, seed) {
            let entry_z = config.z_entry.unwrap_or(config.z_min);
            let _ = writeln!(
                s,
                "transfer length: predicted kappa*Z_T = {:.4} from seed area {:.6} \
                 (measured from the entry face at kappa*Z = {:.4})",
                kappa * zt,
                seed,
                kappa * entry_z
            );
            let parity = crate::experiment::area_parity(&art.run.areas);
            match parity {
                Some(z) => {
                    let _ = writeln!(
                        s,
                        "area parity measured at kappa*Z = {:.4} (depth {:.4} into the medium, \
                         {:+.1}% of prediction)",
                        kappa * z,
                        kappa * (z - entry_z),
                        100.0 * ((z - entry_z) / zt - 1.0)
                    );
                }
                None => {
                    let _ = writeln!(s, "area parity not reached inside the computed range");
                }
            }
        }
    } else {
        let _ = writeln!(
            s,
            "transfer length: undefined for this preparation/seed (inversion {}, seed area {:.4})",
            prep.inversion(),
            seed
        );
    }
    let _ = writeln!(s);

    // Closed-form area-curve summary at the stations.
    let _ = writeln!(s, "area-law reference (matched-soliton family):");
    for snap in &art.run.stations {
        let theory = theoretical_areas(prep, &art.coeffs, snap.z);
        let f = &snap.fields;
        let total =
            pulse_area(&f.omega_a, &t_axis).hypot(pulse_area(&f.omega_b, &t_axis));
        let _ = writeln!(
            s,
            "  kappa*Z {:9.4}: measured total {:8.5} (2 pi = {:.5}); family curve theta_a {:9.5}, theta_b {:9.5}",
            kappa * snap.z,
            total,
            2.0 * PI,
            theory.theta_a,
            theory.theta_b
        );
    }
    let _ = writeln!(s);

    // Shape of the final dominant output channel.
    let out = &art.run.final_fields;
    let peak_a = out.omega_a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let peak_b = out.omega_b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let (name, env) =
        if peak_b >= peak_a { ("stokes", &out.omega_b) } else { ("pump", &out.omega_a) };
    match fit_sech(env, &t_axis) {
        Ok(fit) => {
            let peak = env.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let _ = writeln!(
                s,
                "output {name} sech fit: amplitude {:.5}, width {:.5}, centre {:.4}, \
                 rms misfit {:.3e} ({:.2}% of peak), tail log-slope {:.4} (1/width = {:.4}), \
                 area {:.5}",
                fit.amplitude,
                fit.width,
                fit.center,
                fit.rms_misfit,
                100.0 * fit.rms_misfit / peak,
                fit.tail_log_slope,
                1.0 / fit.width,
                pulse_area(env, &t_axis)
            );
        }
        Err(e) => {
            let _ = writeln!(s, "output {name} sech fit skipped: {e}");
        }
    }
    s
}

/// First crossing of theta_b over theta_a along the area track.
pub fn area_parity(areas: &[twopulse::AreaSample]) -> Option<f64> {
    for w in areas.windows(2) {
        let d0 = w[0].theta_b - w[0].theta_a;
        let d1 = w[1].theta_b - w[1].theta_a;
        if d0 < 0.0 && d1 >= 0.0 {
            return Some(w[0].z + (w[1].z - w[0].z) * (-d0) / (d1 - d0));
        }
    }
    None
}

/// Print the closed-form area curves for the configured medium as CSV.
pub fn print_area_curves(config: &ExperimentConfig, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    let realized = config.realize().map_err(|e| CliError::Config(vec![e]))?;
    let coeffs = compute_kappa_delta(&realized.prep, config.tau, &realized.quadrature)
        .map_err(CliError::Numerical)?;
    writeln!(out, "z_kappa,theta_a,theta_b,theta_total").map_err(CliError::Io)?;
    let n = config.n_z.min(4000);
    for i in 0..=n {
        let z = config.z_min + (config.z_max - config.z_min) * i as f64 / n as f64;
        let r = theoretical_areas(&realized.prep, &coeffs, z);
        writeln!(
            out,
            "{},{},{},{}",
            output::fmt_float(coeffs.kappa * z),
            output::fmt_float(r.theta_a),
            output::fmt_float(r.theta_b),
            output::fmt_float(r.theta_total)
        )
        .map_err(CliError::Io)?;
    }
    if realized.prep.inversion().abs() > 1e-14 {
        let seed = config.pulse_b.area;
        if seed > 0.0 && seed < 2.0 * PI {
            let zt = transfer_length(&realized.prep, &coeffs, seed)
                .map_err(CliError::Numerical)?;
            writeln!(out, "# seed area {seed} reaches parity at kappa*Z_T = {}", coeffs.kappa * zt)
                .map_err(CliError::Io)?;
        }
    }
    Ok(())
}
