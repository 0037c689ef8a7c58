//! Z-marching of the coupled field/medium system.
//!
//! Each step recomputes the atomic response from the dephased initial state
//! by sweeping the time integrator across the axis (in the retarded frame
//! every slab's atomic problem is independent given the local fields), then
//! advances the envelopes with an explicit midpoint rule:
//!
//! ```text
//! F(Z + dZ/2) = F(Z) + (dZ/2) (-i mu P[F(Z)])
//! F(Z + dZ)   = F(Z) +  dZ    (-i mu P[F(Z + dZ/2)])
//! ```
//!
//! Outside the occupancy mask the envelopes are frozen (the retarded frame
//! removes vacuum transport). Occupancy is sampled at step midpoints, so
//! medium faces should sit on step boundaries.

use num_complex::Complex64 as C64;

use crate::bloch::{march_bloch, AtomClassState};
use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::SimulationGrid;
use crate::medium::{initial_density, MediumPrep};
use crate::util::trapezoid_complex;

/// Doppler-averaged medium response to a given field state.
#[derive(Debug, Clone)]
pub struct PolarizationResponse {
    /// <rho_13>(T), the source of the pump envelope.
    pub p_a: Vec<C64>,
    /// <rho_23>(T), the source of the Stokes envelope.
    pub p_b: Vec<C64>,
    /// <rho_33>(T), stored for flux diagnostics.
    pub rho33_avg: Vec<f64>,
}

/// Marching scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Second-order explicit midpoint rule.
    Midpoint,
}

/// Field state and medium response recorded at one station.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub z: f64,
    pub fields: FieldState,
    pub rho33_avg: Vec<f64>,
    /// Whether atoms occupy this station's position.
    pub in_medium: bool,
    /// |Omega|^2 flux one and two steps before/after, when those steps ran
    /// inside the medium; used by the flux-conservation diagnostic (the
    /// four-point record admits a fourth-order Z stencil).
    pub flux_prev: Option<Vec<f64>>,
    pub flux_next: Option<Vec<f64>>,
    pub flux_prev2: Option<Vec<f64>>,
    pub flux_next2: Option<Vec<f64>>,
    pub dz: f64,
}

/// Pulse areas |integral Omega dT| recorded along the march.
#[derive(Debug, Clone, Copy)]
pub struct AreaSample {
    pub z: f64,
    pub theta_a: f64,
    pub theta_b: f64,
}

/// Result of a propagation run.
#[derive(Debug, Clone)]
pub struct Propagation {
    pub stations: Vec<Snapshot>,
    pub areas: Vec<AreaSample>,
    pub final_fields: FieldState,
    /// Max relative drift of the time-integrated flux across the run; the
    /// exact evolution conserves it whenever the excited state relaxes to
    /// zero at both ends of the axis.
    pub fluence_drift: f64,
}

/// Evenly spaced station step indices including both endpoints.
pub fn even_stations(n_z: usize, count: usize) -> Vec<usize> {
    let count = count.max(2);
    let mut steps: Vec<usize> = (0..count)
        .map(|i| (i as f64 / (count - 1) as f64 * n_z as f64).round() as usize)
        .collect();
    steps.dedup();
    steps
}

fn per_class_substeps(detuning: f64, dt: f64, base: usize) -> usize {
    // Keep the free-rotation phase per substep below ~0.4 rad so detuned
    // classes stay inside the accurate region of the stepper.
    let stiff = (detuning.abs() * dt / 0.4).ceil() as usize;
    base.max(stiff).max(1)
}

/// Doppler-averaged polarization produced by the given fields.
pub fn polarization(
    fields: &FieldState,
    prep: &MediumPrep,
    grid: &SimulationGrid,
    substeps: usize,
) -> Result<PolarizationResponse> {
    if let Some(i) = fields.first_non_finite() {
        return Err(Error::IntegrationFailure {
            t_index: i,
            reason: "non-finite field sample entering polarization sweep".into(),
        });
    }
    let t_axis = grid.t_axis();
    let n = t_axis.len();
    if fields.len() != n {
        return Err(Error::InvalidParameter(format!(
            "field state has {} samples, grid has {n}",
            fields.len()
        )));
    }
    let rho0 = initial_density(prep);
    let mut p_a = vec![C64::new(0.0, 0.0); n];
    let mut p_b = vec![C64::new(0.0, 0.0); n];
    let mut rho33 = vec![0.0f64; n];
    for node in &grid.doppler {
        let class = AtomClassState::new(rho0, node.detuning, node.weight)?;
        let sub = per_class_substeps(node.detuning, grid.dt(), substeps);
        let w = node.weight;
        march_bloch(&class, &fields.omega_a, &fields.omega_b, &t_axis, sub, |i, rho| {
            p_a[i] += w * rho.r13;
            p_b[i] += w * rho.r23;
            rho33[i] += w * rho.d3;
        })?;
    }
    Ok(PolarizationResponse { p_a, p_b, rho33_avg: rho33 })
}

fn advance(fields: &FieldState, response: &PolarizationResponse, mu: f64, dz: f64) -> FieldState {
    let minus_i_mu = C64::new(0.0, -mu);
    let omega_a = fields
        .omega_a
        .iter()
        .zip(&response.p_a)
        .map(|(f, p)| f + dz * minus_i_mu * p)
        .collect();
    let omega_b = fields
        .omega_b
        .iter()
        .zip(&response.p_b)
        .map(|(f, p)| f + dz * minus_i_mu * p)
        .collect();
    FieldState { omega_a, omega_b, z_position: fields.z_position + dz }
}

fn max_polarization(response: &PolarizationResponse) -> f64 {
    response
        .p_a
        .iter()
        .chain(&response.p_b)
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

fn envelope_boundary_check(envelope: &[C64], which: &str) -> Result<()> {
    let peak = envelope.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(());
    }
    let edge = envelope[0].norm().max(envelope[envelope.len() - 1].norm());
    if edge > 6e-3 * peak {
        return Err(Error::Resolution {
            z: f64::NAN,
            reason: format!(
                "{which} envelope is {:.2e} of its peak at the axis boundary; start the axis \
                 at least 6 pulse widths before the earliest pulse",
                edge / peak
            ),
        });
    }
    Ok(())
}

/// March the entry fields through the medium, recording snapshots at the
/// given step indices and pulse areas every `area_stride` steps.
pub fn propagate(
    entry: &FieldState,
    prep: &MediumPrep,
    grid: &SimulationGrid,
    scheme: Scheme,
    station_steps: &[usize],
    substeps: usize,
    area_stride: usize,
) -> Result<Propagation> {
    let Scheme::Midpoint = scheme;
    if entry.len() != grid.n_t {
        return Err(Error::InvalidParameter(format!(
            "entry fields have {} samples, grid has {}",
            entry.len(),
            grid.n_t
        )));
    }
    envelope_boundary_check(&entry.omega_a, "pump")?;
    envelope_boundary_check(&entry.omega_b, "Stokes")?;
    let area_stride = area_stride.max(1);
    let dz = grid.dz();
    let dt = grid.dt();
    let mut stations: Vec<usize> = station_steps.to_vec();
    stations.sort_unstable();
    stations.dedup();
    if stations.iter().any(|&s| s > grid.n_z) {
        return Err(Error::InvalidParameter(format!(
            "station step beyond the propagation axis (n_z = {})",
            grid.n_z
        )));
    }

    let mut fields = FieldState {
        omega_a: entry.omega_a.clone(),
        omega_b: entry.omega_b.clone(),
        z_position: grid.z_min,
    };
    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut areas: Vec<AreaSample> = Vec::new();
    // Stations waiting for their forward fluxes: (index, steps still owed).
    let mut pending: Vec<(usize, u8)> = Vec::new();
    let mut prev_step_in_medium = false;
    let mut prev2_step_in_medium = false;
    // Fluxes at z - dz and z - 2 dz.
    let mut prev_flux: Option<Vec<f64>> = None;
    let mut prev2_flux: Option<Vec<f64>> = None;

    let fluence = |f: &FieldState| -> f64 {
        f.flux().iter().sum::<f64>() * dt
    };
    let fluence0 = fluence(&fields);
    let mut fluence_drift = 0.0f64;

    let record_area = |areas: &mut Vec<AreaSample>, f: &FieldState| {
        areas.push(AreaSample {
            z: f.z_position,
            theta_a: trapezoid_complex(&f.omega_a, dt).norm(),
            theta_b: trapezoid_complex(&f.omega_b, dt).norm(),
        });
    };

    for step in 0..=grid.n_z {
        let is_station = stations.binary_search(&step).is_ok();
        let step_in_medium =
            step < grid.n_z && prep.occupancy.contains(fields.z_position + 0.5 * dz);

        // Response at the current position, needed for the predictor and for
        // station bookkeeping. Skipped in vacuum, where it is zero anyway
        // because the atoms start unexcited.
        let station_has_atoms = is_station && prep.occupancy.contains(fields.z_position);
        let need_response = step_in_medium || station_has_atoms;
        let response = if need_response {
            Some(polarization(&fields, prep, grid, substeps)?)
        } else {
            None
        };

        if is_station {
            let rho33 = if station_has_atoms {
                response.as_ref().expect("station response").rho33_avg.clone()
            } else {
                vec![0.0; grid.n_t]
            };
            snapshots.push(Snapshot {
                step,
                z: fields.z_position,
                fields: fields.clone(),
                rho33_avg: rho33,
                in_medium: station_has_atoms,
                flux_prev: if prev_step_in_medium { prev_flux.clone() } else { None },
                flux_next: None,
                flux_prev2: if prev_step_in_medium && prev2_step_in_medium {
                    prev2_flux.clone()
                } else {
                    None
                },
                flux_next2: None,
                dz,
            });
            if step < grid.n_z {
                pending.push((snapshots.len() - 1, 2));
            }
        }
        if step % area_stride == 0 || step == grid.n_z {
            record_area(&mut areas, &fields);
        }
        if step == grid.n_z {
            break;
        }

        prev2_flux = prev_flux.take();
        prev_flux = Some(fields.flux());
        let next = if step_in_medium {
            let response = response.expect("medium step computed its response");
            // Sanity check: a single step may not change the envelopes by
            // more than half of their current scale.
            let increment = prep.mu * dz * max_polarization(&response);
            let scale = fields.max_amplitude();
            if scale > 0.0 && increment > 0.5 * scale {
                return Err(Error::Resolution {
                    z: fields.z_position,
                    reason: format!(
                        "z step changes the fields by {:.2} of their scale; refine dz",
                        increment / scale
                    ),
                });
            }
            let half = advance(&fields, &response, prep.mu, 0.5 * dz);
            let mid_response = polarization(&half, prep, grid, substeps)?;
            advance(&fields, &mid_response, prep.mu, dz)
        } else {
            FieldState {
                omega_a: fields.omega_a.clone(),
                omega_b: fields.omega_b.clone(),
                z_position: fields.z_position + dz,
            }
        };

        pending.retain_mut(|(idx, owed)| {
            if !step_in_medium {
                // A vacuum step interrupts the stencil; stop filling.
                return false;
            }
            if *owed == 2 {
                snapshots[*idx].flux_next = Some(next.flux());
                *owed = 1;
                true
            } else {
                snapshots[*idx].flux_next2 = Some(next.flux());
                false
            }
        });
        if let Some(i) = next.first_non_finite() {
            return Err(Error::IntegrationFailure {
                t_index: i,
                reason: format!("non-finite fields after step at z = {}", fields.z_position),
            });
        }
        fields = next;
        prev2_step_in_medium = prev_step_in_medium;
        prev_step_in_medium = step_in_medium;
        if fluence0 > 0.0 {
            fluence_drift = fluence_drift.max((fluence(&fields) - fluence0).abs() / fluence0);
        }
    }

    Ok(Propagation { stations: snapshots, areas, final_fields: fields, fluence_drift })
}
