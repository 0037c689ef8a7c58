//! Closed-form two-pulse solutions built by dressing the trivial
//! (zero-field, diagonal ground-state) configuration.
//!
//! The dressed solution is generated by a vector `s(Z,T)` whose components
//! are single exponentials; fields and density matrix are algebraic in the
//! projector `P = |s><s| / <s|s>`:
//!
//! ```text
//! Omega_a = -4i eta P_13,   Omega_b = -4i eta P_23,   eta = 1/tau,
//! rho     = (2P - c) rho0 (2P - c)^dagger / (1 + (Delta tau)^2),
//! c       = 1 + i Delta tau.
//! ```
//!
//! `(2P - c)/sqrt(1 + (Delta tau)^2)` is unitary, so the dressed density
//! matrix inherits trace, Hermiticity, positivity and purity from the
//! diagonal proto-density exactly.
//!
//! All exponentials are evaluated with a shared max-exponent shift, which
//! the projector normalization cancels, so the formulas stay finite for
//! |T/tau| and |kappa Z| up to ~1e4.

use num_complex::Complex64 as C64;

use crate::density::DensityMatrix3;
use crate::error::{Error, Result};
use crate::grid::DopplerNode;
use crate::medium::MediumPrep;

/// Weak-field absorption and dispersion coefficients for soliton width
/// `tau`, computed from the detuning quadrature.
#[derive(Debug, Clone, Copy)]
pub struct PropagationCoefficients {
    /// Absorption scale: 1/kappa is the natural propagation length unit.
    pub kappa: f64,
    /// Dispersive shift; each envelope phase advances as -kappa-weighted
    /// population times `delta_disp * Z`.
    pub delta_disp: f64,
    /// Soliton width (inverse of the dressing parameter).
    pub tau: f64,
}

/// kappa = (mu/2tau) <1/(Delta^2 + 1/tau^2)>,
/// delta = (mu/2)    <Delta/(Delta^2 + 1/tau^2)>.
pub fn compute_kappa_delta(
    prep: &MediumPrep,
    tau: f64,
    quadrature: &[DopplerNode],
) -> Result<PropagationCoefficients> {
    if tau <= 0.0 {
        return Err(Error::InvalidParameter(format!("tau must be positive (got {tau})")));
    }
    let mut kappa = 0.0;
    let mut delta = 0.0;
    for node in quadrature {
        let lorentz = 1.0 / (node.detuning * node.detuning + 1.0 / (tau * tau));
        kappa += node.weight * lorentz;
        delta += node.weight * node.detuning * lorentz;
    }
    kappa *= prep.mu / (2.0 * tau);
    delta *= prep.mu / 2.0;
    if !(kappa.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidParameter("non-finite propagation coefficients".into()));
    }
    Ok(PropagationCoefficients { kappa, delta_disp: delta, tau })
}

/// A dressed two-pulse solution: medium preparation, propagation
/// coefficients and the constant seed vector `u`.
#[derive(Debug, Clone)]
pub struct AnalyticSolution {
    pub prep: MediumPrep,
    pub coeffs: PropagationCoefficients,
    pub u_vector: [C64; 3],
    /// Detuning quadrature the coefficients were computed with; the same
    /// nodes must be used for any average over this solution, otherwise the
    /// evolution equations are not satisfied identically.
    pub quadrature: Vec<DopplerNode>,
}

/// Asymptotic propagation regimes of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Far before the transfer zone (-kappa Z >> 1): pump soliton only.
    Input,
    /// Far after the transfer zone (kappa Z >> 1): Stokes soliton only.
    Output,
}

impl AnalyticSolution {
    /// Standard seed vector; shifts of soliton position and phase come from
    /// changing it.
    pub const DEFAULT_U: [C64; 3] =
        [C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, -1.0)];

    pub fn new(prep: MediumPrep, tau: f64, quadrature: Vec<DopplerNode>) -> Result<Self> {
        Self::with_u(prep, tau, quadrature, Self::DEFAULT_U)
    }

    pub fn with_u(
        prep: MediumPrep,
        tau: f64,
        quadrature: Vec<DopplerNode>,
        u_vector: [C64; 3],
    ) -> Result<Self> {
        if u_vector.iter().all(|u| u.norm() == 0.0) {
            return Err(Error::InvalidParameter("u vector must be non-zero".into()));
        }
        let coeffs = compute_kappa_delta(&prep, tau, &quadrature)?;
        Ok(Self { prep, coeffs, u_vector, quadrature })
    }

    /// Complex exponents of the three generator components.
    ///
    /// The Z coefficient is alpha^2 (kappa + i delta) (and the beta^2
    /// analogue): with the quadrature identity
    /// <1/(1 - i Delta tau)> = (2/(mu tau)) (kappa + i delta)
    /// this sign choice reproduces the phase law
    /// arg Omega_a(Z) - arg Omega_a(0) = -alpha^2 delta Z.
    fn exponents(&self, z: f64, t: f64) -> [C64; 3] {
        let tau = self.coeffs.tau;
        let kd = C64::new(self.coeffs.kappa, self.coeffs.delta_disp);
        let half_t = 0.5 * t / tau;
        [
            C64::new(half_t, 0.0) - self.prep.alpha2 * kd * z,
            C64::new(half_t, 0.0) - self.prep.beta2 * kd * z,
            C64::new(-half_t, 0.0),
        ]
    }

    /// Generator vector components, rescaled by a common factor
    /// exp(-max real exponent) so they stay finite for extreme arguments.
    /// Every quantity derived from them is invariant under that rescaling.
    pub fn s_vector(&self, z: f64, t: f64) -> [C64; 3] {
        let exps = self.exponents(z, t);
        let m = exps.iter().map(|e| e.re).fold(f64::NEG_INFINITY, f64::max);
        [
            self.u_vector[0] * (exps[0] - m).exp(),
            self.u_vector[1] * (exps[1] - m).exp(),
            self.u_vector[2] * (exps[2] - m).exp(),
        ]
    }

    /// Projector entries P_ij = s_i s_j^* / <s|s> packed as a full matrix.
    fn projector(&self, z: f64, t: f64) -> [[C64; 3]; 3] {
        let s = self.s_vector(z, t);
        let norm: f64 = s.iter().map(|v| v.norm_sqr()).sum();
        let mut p = [[C64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] = s[i] * s[j].conj() / norm;
            }
        }
        p
    }

    /// Pump and Stokes envelopes at (Z, T).
    pub fn fields(&self, z: f64, t: f64) -> (C64, C64) {
        let p = self.projector(z, t);
        let minus_4i_eta = C64::new(0.0, -4.0 / self.coeffs.tau);
        (minus_4i_eta * p[0][2], minus_4i_eta * p[1][2])
    }

    /// Density matrix of the atom class with detuning `delta` at (Z, T).
    pub fn density(&self, z: f64, t: f64, delta: f64) -> DensityMatrix3 {
        let tau = self.coeffs.tau;
        let p = self.projector(z, t);
        let c = C64::new(1.0, delta * tau);
        // G = 2P - c; rho = (a^2 G e1 (G e1)^+  + b^2 G e2 (G e2)^+) / |c|^2
        let mut g = [[C64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] = 2.0 * p[i][j];
            }
            g[i][i] -= c;
        }
        let norm = 1.0 / (1.0 + delta * delta * tau * tau);
        let mut rho = DensityMatrix3::zero();
        for i in 0..3 {
            for j in 0..3 {
                rho.m[i][j] = norm
                    * (self.prep.alpha2 * g[i][0] * g[j][0].conj()
                        + self.prep.beta2 * g[i][1] * g[j][1].conj());
            }
        }
        rho
    }

    /// Quadrature-averaged density matrix at (Z, T).
    pub fn density_averaged(&self, z: f64, t: f64) -> DensityMatrix3 {
        let mut avg = DensityMatrix3::zero();
        for node in &self.quadrature {
            avg = avg.add(&self.density(z, t, node.detuning).scaled(node.weight));
        }
        avg
    }

    /// Simplified sech envelopes of the asymptotic regimes.
    pub fn asymptotic_fields(&self, regime: Regime, z: f64, t: f64) -> (C64, C64) {
        let tau = self.coeffs.tau;
        let kappa = self.coeffs.kappa;
        let delta = self.coeffs.delta_disp;
        let zero = C64::new(0.0, 0.0);
        match regime {
            Regime::Input => {
                let x = t / tau - self.prep.alpha2 * kappa * z;
                let amp = 2.0 / tau * sech(x);
                (C64::from_polar(amp, -self.prep.alpha2 * delta * z), zero)
            }
            Regime::Output => {
                let x = t / tau - self.prep.beta2 * kappa * z;
                let amp = 2.0 / tau * sech(x);
                (zero, C64::from_polar(amp, -self.prep.beta2 * delta * z))
            }
        }
    }
}

fn sech(x: f64) -> f64 {
    2.0 / (x.exp() + (-x).exp())
}

/// Evaluate a dressed solution on a grid and package it in the same
/// snapshot format the marching solvers produce, so the downstream
/// diagnostics and writers treat all solvers uniformly.
pub fn analytic_run(
    sol: &AnalyticSolution,
    grid: &crate::grid::SimulationGrid,
    station_steps: &[usize],
    area_stride: usize,
) -> crate::maxwell::Propagation {
    use crate::maxwell::{AreaSample, Propagation, Snapshot};
    use crate::util::trapezoid_complex;

    let t_axis = grid.t_axis();
    let dt = grid.dt();
    let dz = grid.dz();
    let sample = |z: f64| -> crate::field::FieldState {
        crate::field::FieldState {
            omega_a: t_axis.iter().map(|&t| sol.fields(z, t).0).collect(),
            omega_b: t_axis.iter().map(|&t| sol.fields(z, t).1).collect(),
            z_position: z,
        }
    };
    let mut steps: Vec<usize> = station_steps.to_vec();
    steps.sort_unstable();
    steps.dedup();
    let stations = steps
        .into_iter()
        .filter(|&s| s <= grid.n_z)
        .map(|step| {
            let z = grid.z_min + step as f64 * dz;
            let fields = sample(z);
            let rho33_avg = t_axis
                .iter()
                .map(|&t| sol.density_averaged(z, t).m[2][2].re)
                .collect();
            Snapshot {
                step,
                z,
                fields,
                rho33_avg,
                in_medium: sol.prep.occupancy.contains(z),
                flux_prev: Some(sample(z - dz).flux()),
                flux_next: Some(sample(z + dz).flux()),
                flux_prev2: Some(sample(z - 2.0 * dz).flux()),
                flux_next2: Some(sample(z + 2.0 * dz).flux()),
                dz,
            }
        })
        .collect();
    let stride = area_stride.max(1);
    let mut areas = Vec::new();
    let mut step = 0usize;
    while step <= grid.n_z {
        let z = grid.z_min + step as f64 * dz;
        let f = sample(z);
        areas.push(AreaSample {
            z,
            theta_a: trapezoid_complex(&f.omega_a, dt).norm(),
            theta_b: trapezoid_complex(&f.omega_b, dt).norm(),
        });
        if step == grid.n_z {
            break;
        }
        step = (step + stride).min(grid.n_z);
    }
    let final_fields = sample(grid.z_max);
    Propagation { stations, areas, final_fields, fluence_drift: 0.0 }
}

/// Package a dressed solution from an explicit proto-solution.
///
/// Only the trivial proto-solution is supported: zero fields and a diagonal
/// ground-state density matrix consistent with `prep`. Anything else is out
/// of scope for this construction.
pub fn backlund_dress(
    proto_rho: &DensityMatrix3,
    proto_omega_a: &[C64],
    proto_omega_b: &[C64],
    prep: &MediumPrep,
    tau: f64,
    quadrature: &[DopplerNode],
) -> Result<AnalyticSolution> {
    if !proto_rho.is_diagonal(1e-14) {
        return Err(Error::UnsupportedProto(
            "proto density matrix must be diagonal (dephased preparation)".into(),
        ));
    }
    if proto_rho.m[2][2].norm() > 1e-14 {
        return Err(Error::UnsupportedProto(
            "proto density matrix must have empty upper level".into(),
        ));
    }
    if proto_omega_a.iter().chain(proto_omega_b).any(|v| v.norm() > 0.0) {
        return Err(Error::UnsupportedProto("proto fields must vanish".into()));
    }
    if (proto_rho.m[0][0].re - prep.alpha2).abs() > 1e-12
        || (proto_rho.m[1][1].re - prep.beta2).abs() > 1e-12
    {
        return Err(Error::UnsupportedProto(format!(
            "proto populations ({}, {}) disagree with preparation ({}, {})",
            proto_rho.m[0][0].re, proto_rho.m[1][1].re, prep.alpha2, prep.beta2
        )));
    }
    AnalyticSolution::new(*prep, tau, quadrature.to_vec())
}
