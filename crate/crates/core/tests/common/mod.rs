//! Shared helpers for the integration and acceptance suites: experiment
//! builders, error metrics and independent finite-difference residuals of
//! the evolution equations.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use twopulse::*;

/// Pure-state sharp-line medium with detuning 10/tau and coupling chosen so
/// the absorption scale is exactly 1.
pub fn sharp_pure_prep() -> MediumPrep {
    MediumPrep::pure_sharp(10.0, 202.0)
}

pub fn sharp_solution(prep: MediumPrep) -> AnalyticSolution {
    let quad = make_doppler_quadrature(prep.delta_bar, LineShape::Sharp, 1).unwrap();
    AnalyticSolution::new(prep, 1.0, quad).unwrap()
}

/// Sample the dressed-solution fields on the grid's time axis at `z`.
pub fn analytic_entry(sol: &AnalyticSolution, grid: &SimulationGrid, z: f64) -> FieldState {
    let t_axis = grid.t_axis();
    FieldState {
        omega_a: t_axis.iter().map(|&t| sol.fields(z, t).0).collect(),
        omega_b: t_axis.iter().map(|&t| sol.fields(z, t).1).collect(),
        z_position: z,
    }
}

/// Relative L2 distance between a field state and the dressed solution
/// evaluated at the same position.
pub fn l2_error_vs_analytic(
    fields: &FieldState,
    sol: &AnalyticSolution,
    t_axis: &[f64],
) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &t) in t_axis.iter().enumerate() {
        let (ea, eb) = sol.fields(fields.z_position, t);
        num += (fields.omega_a[i] - ea).norm_sqr() + (fields.omega_b[i] - eb).norm_sqr();
        den += ea.norm_sqr() + eb.norm_sqr();
    }
    (num / den).sqrt()
}

pub struct GaussianExperiment {
    pub run: Propagation,
    pub prep: MediumPrep,
    pub grid: SimulationGrid,
    pub coeffs: PropagationCoefficients,
    pub entry: FieldState,
}

/// Two gaussian input pulses entering a slab medium at Z = 0, with the
/// coupling rescaled so kappa = 1 for the run's own quadrature.
pub fn gaussian_experiment(
    theta_a: f64,
    theta_b: f64,
    alpha2: f64,
    kz_end: f64,
    nodes: usize,
    dz: f64,
    n_stations: usize,
) -> GaussianExperiment {
    let line = LineShape::Gaussian { t2_star: 1.0 / 3.0 };
    let occ = Occupancy::Slab { entry: 0.0, exit: kz_end };
    let probe = MediumPrep::new(alpha2, 1.0 - alpha2, 10.0, line, 1.0, occ).unwrap();
    let quad = make_doppler_quadrature(10.0, line, nodes).unwrap();
    let k1 = compute_kappa_delta(&probe, 1.0, &quad).unwrap().kappa;
    let prep = MediumPrep::new(alpha2, 1.0 - alpha2, 10.0, line, 1.0 / k1, occ).unwrap();
    let n_z = (kz_end / dz).round() as usize;
    let grid = SimulationGrid::new(-8.0, 18.0, 1301, 0.0, kz_end, n_z, quad).unwrap();
    let t = grid.t_axis();
    let pa = PulseSpec::new(Channel::PumpA, PulseShape::Gaussian, theta_a, 1.0, 0.0, 0.0).unwrap();
    let pb =
        PulseSpec::new(Channel::StokesB, PulseShape::Gaussian, theta_b, 1.0, 0.0, 0.0).unwrap();
    let entry = FieldState {
        omega_a: sample_input_pulse(&pa, &t).envelope,
        omega_b: sample_input_pulse(&pb, &t).envelope,
        z_position: 0.0,
    };
    let stations = even_stations(n_z, n_stations);
    let run = propagate(&entry, &prep, &grid, Scheme::Midpoint, &stations, 1, 20).unwrap();
    let coeffs = compute_kappa_delta(&prep, 1.0, &grid.doppler).unwrap();
    GaussianExperiment { run, prep, grid, coeffs, entry }
}

/// Sech pump plus weak sech Stokes on a sharp-line pure-state slab,
/// propagated by both solvers.
pub struct SechPair {
    pub full: Propagation,
    pub adiabatic: Propagation,
    pub entry: FieldState,
    pub grid: SimulationGrid,
    pub prep: MediumPrep,
}

pub fn sech_pair(theta_a: f64, kz_end: f64, dz: f64) -> SechPair {
    let occ = Occupancy::Slab { entry: 0.0, exit: kz_end };
    let prep = MediumPrep::new(1.0, 0.0, 10.0, LineShape::Sharp, 202.0, occ).unwrap();
    let quad = make_doppler_quadrature(10.0, LineShape::Sharp, 1).unwrap();
    let n_z = (kz_end / dz).round() as usize;
    let grid = SimulationGrid::new(-8.0, 18.0, 1301, 0.0, kz_end, n_z, quad).unwrap();
    let t = grid.t_axis();
    let pa = PulseSpec::new(Channel::PumpA, PulseShape::Sech, theta_a, 1.0, 0.0, 0.0).unwrap();
    let pb =
        PulseSpec::new(Channel::StokesB, PulseShape::Sech, 0.005 * PI, 1.0, 0.0, 0.0).unwrap();
    let entry = FieldState {
        omega_a: sample_input_pulse(&pa, &t).envelope,
        omega_b: sample_input_pulse(&pb, &t).envelope,
        z_position: 0.0,
    };
    let stations = even_stations(n_z, 6);
    let full = propagate(&entry, &prep, &grid, Scheme::Midpoint, &stations, 1, 40).unwrap();
    let adiabatic = reduced_propagate(&entry, &prep, &grid, &stations, 1, 40).unwrap();
    SechPair { full, adiabatic, entry, grid, prep }
}

/// First crossing of theta_b over theta_a along the recorded area curve.
pub fn area_parity_z(areas: &[AreaSample]) -> Option<f64> {
    for w in areas.windows(2) {
        let d0 = w[0].theta_b - w[0].theta_a;
        let d1 = w[1].theta_b - w[1].theta_a;
        if d0 < 0.0 && d1 >= 0.0 {
            return Some(w[0].z + (w[1].z - w[0].z) * (-d0) / (d1 - d0));
        }
    }
    None
}

/// Energy in one envelope: integral of |W|^2 over the axis.
pub fn envelope_energy(env: &[C64], dt: f64) -> f64 {
    env.iter().map(|v| v.norm_sqr()).sum::<f64>() * dt
}

/// Max |d_T rho - rhs(rho, fields, Delta)| over the probe points,
/// normalized by the max |rhs| entry, with a second-order centered stencil
/// of spacing `h_t`. Everything is evaluated from the closed forms, so this
/// is independent of the integrator code path.
pub fn bloch_equation_residual(
    sol: &AnalyticSolution,
    detuning: f64,
    points: &[(f64, f64)],
    h_t: f64,
) -> f64 {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &(z, t) in points {
        let plus = sol.density(z, t + h_t, detuning);
        let minus = sol.density(z, t - h_t, detuning);
        let (wa, wb) = sol.fields(z, t);
        let rhs = bloch_rhs(&sol.density(z, t, detuning), wa, wb, detuning);
        for i in 0..3 {
            for j in 0..3 {
                let fd = (plus.m[i][j] - minus.m[i][j]) / (2.0 * h_t);
                worst = worst.max((fd - rhs.m[i][j]).norm());
                scale = scale.max(rhs.m[i][j].norm());
            }
        }
    }
    worst / scale.max(1e-300)
}

/// Max |d_Z W + i mu <rho_coh>| over the probe points, normalized by
/// max |mu <rho_coh>|, with a second-order centered stencil of spacing
/// `h_z`; the coherence average runs over the solution's own quadrature.
pub fn maxwell_equation_residual(sol: &AnalyticSolution, points: &[(f64, f64)], h_z: f64) -> f64 {
    let mu = sol.prep.mu;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for &(z, t) in points {
        let (ap, bp) = sol.fields(z + h_z, t);
        let (am, bm) = sol.fields(z - h_z, t);
        let avg = sol.density_averaged(z, t);
        let rhs_a = C64::new(0.0, -mu) * avg.m[0][2];
        let rhs_b = C64::new(0.0, -mu) * avg.m[1][2];
        let fd_a = (ap - am) / (2.0 * h_z);
        let fd_b = (bp - bm) / (2.0 * h_z);
        worst = worst.max((fd_a - rhs_a).norm()).max((fd_b - rhs_b).norm());
        scale = scale.max(rhs_a.norm()).max(rhs_b.norm());
    }
    worst / scale.max(1e-300)
}

/// Probe points spanning the transfer zone.
pub fn residual_probe_points(kappa: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for iz in -3..=3 {
        for it in -3..=3 {
            pts.push((iz as f64 / kappa, 1.7 * it as f64));
        }
    }
    pts
}

/// Time-stepping error of one atom class against the dressed solution at
/// fixed Z, on an axis with `n_t` samples.
pub fn bloch_oracle_error(n_t: usize, substeps: usize) -> f64 {
    let prep = MediumPrep::new(0.7, 0.3, 3.0, LineShape::Sharp, 20.0, Occupancy::Everywhere)
        .unwrap();
    let quad = make_doppler_quadrature(3.0, LineShape::Sharp, 1).unwrap();
    let sol = AnalyticSolution::new(prep, 1.0, quad).unwrap();
    let z = 1.0 / sol.coeffs.kappa;
    let t_axis = twopulse::util::linspace(-14.0, 10.0, n_t);
    let wa: Vec<C64> = t_axis.iter().map(|&t| sol.fields(z, t).0).collect();
    let wb: Vec<C64> = t_axis.iter().map(|&t| sol.fields(z, t).1).collect();
    let initial = AtomClassState::new(sol.density(z, t_axis[0], 3.0), 3.0, 1.0).unwrap();
    let traj = integrate_atom(&initial, &wa, &wb, &t_axis, substeps).unwrap();
    let mut err = 0.0f64;
    for (rho, &t) in traj.iter().zip(&t_axis) {
        let exact = sol.density(z, t, 3.0);
        for i in 0..3 {
            for j in 0..3 {
                err = err.max((rho.m[i][j] - exact.m[i][j]).norm());
            }
        }
    }
    err
}
