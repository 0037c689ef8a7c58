//! Reduced two-level description of far-detuned Raman propagation.
//!
//! The excited level is eliminated, leaving the ground-state pair driven by
//! the two-photon Rabi frequency `W2 = Wa Wb*/(2 D)` and Stark shift
//! `D2 = (|Wa|^2 - |Wb|^2)/(4 D)`:
//!
//! ```text
//! rho_11' =  i (W2/2) rho_21 - i (W2*/2) rho_12
//! rho_22' = -rho_11'
//! rho_12' =  i (W2/2)(rho_22 - rho_11) + i D2 rho_12
//! ```
//!
//! and the envelopes obey `dF/dZ = -i (mu / 2D) R F` with
//! `R = [[rho_11, rho_12], [rho_21, rho_22]]` and `F = (Wa, Wb)`. Since `R`
//! is Hermitian the exact flow is unitary per time sample, conserving
//! |Wa|^2 + |Wb|^2 pointwise; the Z update exponentiates the midpoint `R`
//! so the discrete march conserves it to round-off as well.
//!
//! The model is only defined off resonance and without inhomogeneous
//! broadening (a single sharp detuning class).

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::SimulationGrid;
use crate::maxwell::{AreaSample, Propagation, Snapshot};
use crate::medium::{LineShape, MediumPrep};
use crate::util::{cubic_sample, trapezoid_complex};

/// Density matrix of the two ground states.
#[derive(Debug, Clone, Copy)]
pub struct GroundDensityMatrix2 {
    pub rho11: f64,
    pub rho22: f64,
    pub rho12: C64,
}

impl GroundDensityMatrix2 {
    pub fn new(rho11: f64, rho22: f64, rho12: C64) -> Result<Self> {
        if (rho11 + rho22 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "ground trace must be 1 (got {})",
                rho11 + rho22
            )));
        }
        let g = Self { rho11, rho22, rho12 };
        if g.min_eigenvalue() < -1e-10 {
            return Err(Error::InvalidParameter("ground density matrix not PSD".into()));
        }
        Ok(g)
    }

    pub fn from_populations(rho11: f64, rho22: f64) -> Result<Self> {
        Self::new(rho11, rho22, C64::new(0.0, 0.0))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let avg = 0.5 * (self.rho11 + self.rho22);
        let k = (0.25 * (self.rho11 - self.rho22).powi(2) + self.rho12.norm_sqr()).sqrt();
        avg - k
    }
}

/// Two-photon Rabi frequency and AC Stark shift for the instantaneous
/// fields.
pub fn two_photon_drive(omega_a: C64, omega_b: C64, delta_bar: f64) -> Result<(C64, f64)> {
    if delta_bar == 0.0 {
        return Err(Error::InvalidParameter(
            "adiabatic model is undefined on resonance (delta_bar = 0)".into(),
        ));
    }
    let rabi2 = omega_a * omega_b.conj() / (2.0 * delta_bar);
    let stark2 = (omega_a.norm_sqr() - omega_b.norm_sqr()) / (4.0 * delta_bar);
    Ok((rabi2, stark2))
}

/// Time derivative of the ground-state density matrix.
pub fn reduced_bloch_rhs(
    rho2: &GroundDensityMatrix2,
    omega_a: C64,
    omega_b: C64,
    delta_bar: f64,
) -> Result<GroundDensityMatrix2> {
    let (rabi2, stark2) = two_photon_drive(omega_a, omega_b, delta_bar)?;
    Ok(rhs2(rho2, rabi2, stark2))
}

#[inline]
fn rhs2(rho: &GroundDensityMatrix2, rabi2: C64, stark2: f64) -> GroundDensityMatrix2 {
    let i = C64::new(0.0, 1.0);
    let d11 = (rabi2.conj() * rho.rho12).im;
    let r12 = i * (0.5 * rabi2 * (rho.rho22 - rho.rho11) + stark2 * rho.rho12);
    GroundDensityMatrix2 { rho11: d11, rho22: -d11, rho12: r12 }
}

#[inline]
fn axpy2(y: &mut GroundDensityMatrix2, c: f64, k: &GroundDensityMatrix2) {
    y.rho11 += c * k.rho11;
    y.rho22 += c * k.rho22;
    y.rho12 += c * k.rho12;
}

/// Sweep the ground-state matrix across the axis, returning it per sample.
fn sweep_ground(
    initial: GroundDensityMatrix2,
    omega_a: &[C64],
    omega_b: &[C64],
    t_axis: &[f64],
    delta_bar: f64,
    substeps: usize,
) -> Result<Vec<GroundDensityMatrix2>> {
    let dt = t_axis[1] - t_axis[0];
    let t0 = t_axis[0];
    let fields =
        |t: f64| (cubic_sample(omega_a, t0, dt, t), cubic_sample(omega_b, t0, dt, t));
    let drive = |t: f64| -> (C64, f64) {
        let (wa, wb) = fields(t);
        (
            wa * wb.conj() / (2.0 * delta_bar),
            (wa.norm_sqr() - wb.norm_sqr()) / (4.0 * delta_bar),
        )
    };
    let h = dt / substeps as f64;
    let mut rho = initial;
    let mut out = Vec::with_capacity(t_axis.len());
    out.push(rho);
    for i in 0..t_axis.len() - 1 {
        for k in 0..substeps {
            let t = t_axis[i] + k as f64 * h;
            let (r0, s0) = drive(t);
            let (rm, sm) = drive(t + 0.5 * h);
            let (r1, s1) = drive(t + h);
            let k1 = rhs2(&rho, r0, s0);
            let mut y = rho;
            axpy2(&mut y, 0.5 * h, &k1);
            let k2 = rhs2(&y, rm, sm);
            y = rho;
            axpy2(&mut y, 0.5 * h, &k2);
            let k3 = rhs2(&y, rm, sm);
            y = rho;
            axpy2(&mut y, h, &k3);
            let k4 = rhs2(&y, r1, s1);
            axpy2(&mut rho, h / 6.0, &k1);
            axpy2(&mut rho, h / 3.0, &k2);
            axpy2(&mut rho, h / 3.0, &k3);
            axpy2(&mut rho, h / 6.0, &k4);
        }
        out.push(rho);
    }
    Ok(out)
}

/// Apply exp(-i theta R) to (wa, wb) for Hermitian R, exactly unitary.
#[inline]
fn apply_ground_exponential(
    wa: C64,
    wb: C64,
    r: &GroundDensityMatrix2,
    theta: f64,
) -> (C64, C64) {
    let avg = 0.5 * (r.rho11 + r.rho22) * theta;
    let kz = 0.5 * (r.rho11 - r.rho22) * theta;
    let kxy = r.rho12 * theta;
    let k = (kz * kz + kxy.norm_sqr()).sqrt();
    let (cos_k, sinc_k) = if k.abs() < 1e-8 {
        (1.0 - 0.5 * k * k, 1.0 - k * k / 6.0)
    } else {
        (k.cos(), k.sin() / k)
    };
    let phase = C64::from_polar(1.0, -avg);
    let mi_sinc = C64::new(0.0, -sinc_k);
    let ua = phase * (cos_k * wa + mi_sinc * (kz * wa + kxy * wb));
    let ub = phase * (cos_k * wb + mi_sinc * (kxy.conj() * wa - kz * wb));
    (ua, ub)
}

/// March the reduced system through the medium. The scheme mirrors the full
/// solver's midpoint predictor-corrector, with the corrector applied as a
/// unitary rotation so the Manley-Rowe law survives discretization.
pub fn reduced_propagate(
    entry: &FieldState,
    prep: &MediumPrep,
    grid: &SimulationGrid,
    station_steps: &[usize],
    substeps: usize,
    area_stride: usize,
) -> Result<Propagation> {
    if prep.delta_bar == 0.0 {
        return Err(Error::InvalidParameter(
            "adiabatic model is undefined on resonance (delta_bar = 0)".into(),
        ));
    }
    if prep.line != LineShape::Sharp || grid.doppler.len() != 1 {
        return Err(Error::InvalidParameter(
            "the reduced solver supports only the sharp line (one detuning class)".into(),
        ));
    }
    if entry.len() != grid.n_t {
        return Err(Error::InvalidParameter(format!(
            "entry fields have {} samples, grid has {}",
            entry.len(),
            grid.n_t
        )));
    }
    let dz = grid.dz();
    let theta_full = prep.mu * dz / (2.0 * prep.delta_bar);
    if theta_full.abs() > 0.5 {
        return Err(Error::Resolution {
            z: grid.z_min,
            reason: format!(
                "z step rotates the fields by {:.2} rad; refine dz or increase the detuning",
                theta_full.abs()
            ),
        });
    }
    let area_stride = area_stride.max(1);
    let dt = grid.dt();
    let t_axis = grid.t_axis();
    let rho0 = GroundDensityMatrix2::from_populations(prep.alpha2, prep.beta2)?;
    let mut stations: Vec<usize> = station_steps.to_vec();
    stations.sort_unstable();
    stations.dedup();

    let mut fields = FieldState {
        omega_a: entry.omega_a.clone(),
        omega_b: entry.omega_b.clone(),
        z_position: grid.z_min,
    };
    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut areas: Vec<AreaSample> = Vec::new();
    let mut pending_next: Option<usize> = None;
    let mut prev_step_in_medium = false;
    let mut prev_flux: Option<Vec<f64>> = None;

    for step in 0..=grid.n_z {
        let is_station = stations.binary_search(&step).is_ok();
        let step_in_medium =
            step < grid.n_z && prep.occupancy.contains(fields.z_position + 0.5 * dz);
        if is_station {
            snapshots.push(Snapshot {
                step,
                z: fields.z_position,
                fields: fields.clone(),
                rho33_avg: vec![0.0; grid.n_t],
                in_medium: prep.occupancy.contains(fields.z_position),
                flux_prev: if prev_step_in_medium { prev_flux.clone() } else { None },
                flux_next: None,
                flux_prev2: None,
                flux_next2: None,
                dz,
            });
            if step < grid.n_z {
                pending_next = Some(snapshots.len() - 1);
            }
        }
        if step % area_stride == 0 || step == grid.n_z {
            areas.push(AreaSample {
                z: fields.z_position,
                theta_a: trapezoid_complex(&fields.omega_a, dt).norm(),
                theta_b: trapezoid_complex(&fields.omega_b, dt).norm(),
            });
        }
        if step == grid.n_z {
            break;
        }

        prev_flux = Some(fields.flux());
        let next = if step_in_medium {
            // Predictor: half-step rotation with the response at Z.
            let ground = sweep_ground(
                rho0,
                &fields.omega_a,
                &fields.omega_b,
                &t_axis,
                prep.delta_bar,
                substeps,
            )?;
            let mut half_a = Vec::with_capacity(grid.n_t);
            let mut half_b = Vec::with_capacity(grid.n_t);
            for i in 0..grid.n_t {
                let (ha, hb) = apply_ground_exponential(
                    fields.omega_a[i],
                    fields.omega_b[i],
                    &ground[i],
                    0.5 * theta_full,
                );
                half_a.push(ha);
                half_b.push(hb);
            }
            // Corrector: full-step rotation with the midpoint response.
            let ground_mid =
                sweep_ground(rho0, &half_a, &half_b, &t_axis, prep.delta_bar, substeps)?;
            let mut next_a = Vec::with_capacity(grid.n_t);
            let mut next_b = Vec::with_capacity(grid.n_t);
            for i in 0..grid.n_t {
                let (na, nb) = apply_ground_exponential(
                    fields.omega_a[i],
                    fields.omega_b[i],
                    &ground_mid[i],
                    theta_full,
                );
                next_a.push(na);
                next_b.push(nb);
            }
            FieldState { omega_a: next_a, omega_b: next_b, z_position: fields.z_position + dz }
        } else {
            FieldState {
                omega_a: fields.omega_a.clone(),
                omega_b: fields.omega_b.clone(),
                z_position: fields.z_position + dz,
            }
        };
        if let Some(idx) = pending_next.take() {
            if step_in_medium {
                snapshots[idx].flux_next = Some(next.flux());
            }
        }
        fields = next;
        prev_step_in_medium = step_in_medium;
    }

    Ok(Propagation { stations: snapshots, areas, final_fields: fields, fluence_drift: 0.0 })
}
