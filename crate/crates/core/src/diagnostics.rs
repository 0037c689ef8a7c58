//! Observables and verification helpers: pulse areas and their closed-form
//! curves, transfer length, conservation residuals, envelope fits, peak
//! counting and group-velocity measurement.

use num_complex::Complex64 as C64;

use crate::analytic::PropagationCoefficients;
use crate::error::{Error, Result};
use crate::maxwell::Snapshot;
use crate::medium::MediumPrep;
use crate::util::{linear_fit, log_add_exp, refined_peak_position};

/// Pulse areas at one propagation position.
#[derive(Debug, Clone, Copy)]
pub struct AreaReport {
    pub theta_a: f64,
    pub theta_b: f64,
    pub theta_total: f64,
    pub z_position: f64,
}

impl AreaReport {
    pub fn new(theta_a: f64, theta_b: f64, z_position: f64) -> Self {
        Self { theta_a, theta_b, theta_total: theta_a.hypot(theta_b), z_position }
    }
}

/// |integral of the complex envelope| over the axis.
///
/// The magnitude of the complex integral recovers the real areas of the
/// closed-form solutions, whose phase factors are global per pulse.
pub fn pulse_area(envelope: &[C64], t_axis: &[f64]) -> f64 {
    complex_area(envelope, t_axis).norm()
}

fn complex_area(envelope: &[C64], t_axis: &[f64]) -> C64 {
    assert_eq!(envelope.len(), t_axis.len());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..envelope.len().saturating_sub(1) {
        acc += 0.5 * (envelope[i] + envelope[i + 1]) * (t_axis[i + 1] - t_axis[i]);
    }
    acc
}

/// integral of |envelope| over the axis (reported alongside the complex
/// variant in verbose outputs).
pub fn absolute_area(envelope: &[C64], t_axis: &[f64]) -> f64 {
    let mags: Vec<f64> = envelope.iter().map(|v| v.norm()).collect();
    let mut acc = 0.0;
    for i in 0..mags.len().saturating_sub(1) {
        acc += 0.5 * (mags[i] + mags[i + 1]) * (t_axis[i + 1] - t_axis[i]);
    }
    acc
}

/// Closed-form area curves
/// theta_a = 2 pi / h(Z), theta_b = 2 pi / h(-Z),
/// h(Z) = sqrt(1 + exp(2 (alpha^2 - beta^2) kappa Z)),
/// evaluated in log space so extreme arguments underflow cleanly.
pub fn theoretical_areas(prep: &MediumPrep, coeffs: &PropagationCoefficients, z: f64) -> AreaReport {
    let two_pi = 2.0 * std::f64::consts::PI;
    let s = 2.0 * prep.inversion() * coeffs.kappa * z;
    let theta_a = two_pi * (-0.5 * log_add_exp(0.0, s)).exp();
    let theta_b = two_pi * (-0.5 * log_add_exp(0.0, -s)).exp();
    AreaReport { theta_a, theta_b, theta_total: theta_a.hypot(theta_b), z_position: z }
}

/// Depth at which the Stokes area grown from `theta_b_in` crosses the pump
/// area: Z_T = ln((2 pi / theta_b_in)^2 - 1) / (2 kappa (alpha^2 - beta^2)).
pub fn transfer_length(
    prep: &MediumPrep,
    coeffs: &PropagationCoefficients,
    theta_b_in: f64,
) -> Result<f64> {
    if prep.inversion().abs() < 1e-14 {
        return Err(Error::DegenerateInversion);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    if !(theta_b_in > 0.0 && theta_b_in < two_pi) {
        return Err(Error::InvalidParameter(format!(
            "seed area must lie in (0, 2 pi) (got {theta_b_in})"
        )));
    }
    let ratio = two_pi / theta_b_in;
    Ok((ratio * ratio - 1.0).ln() / (2.0 * coeffs.kappa * prep.inversion()))
}

/// Flux-conservation residual of one recorded station.
#[derive(Debug, Clone, Copy)]
pub struct PoyntingReport {
    pub z: f64,
    /// max_T |d_Z flux + 2 mu d_T <rho_33>|
    pub residual_max: f64,
    /// RMS of the residual over the interior samples.
    pub residual_rms: f64,
    pub dz_term_max: f64,
    pub dt_term_max: f64,
    /// residual_max over the larger of the two term maxima; measures how
    /// well the terms cancel, independent of units.
    pub normalized_max: f64,
    /// residual_max over (peak flux at the station) in inverse length.
    pub flux_normalized_max: f64,
    /// |integral of the residual over T| times the step length, over the
    /// peak flux (times the reference width, which is 1 in these units):
    /// the flux-budget closure failure of one step.
    pub integrated_per_step: f64,
    /// max_T flux at the station, for scaling decisions by callers.
    pub peak_flux: f64,
}

/// Centered-difference check of d_Z(|Wa|^2 + |Wb|^2) + 2 mu d_T<rho_33> = 0
/// at every station that recorded both neighbouring fluxes.
///
/// The time derivative uses a fourth-order centered stencil: <rho_33>
/// carries structure at the detuning frequency, which a second-order
/// stencil resolves too coarsely at the reference sampling rate.
pub fn poynting_residual(snapshots: &[Snapshot], dt: f64, mu: f64) -> Vec<PoyntingReport> {
    let mut out = Vec::new();
    for snap in snapshots {
        let (fp, fn_) = match (&snap.flux_prev, &snap.flux_next) {
            (Some(p), Some(n)) => (p, n),
            _ => continue,
        };
        let n = snap.rho33_avg.len();
        let flux_here = snap.fields.flux();
        let peak_flux = flux_here.iter().cloned().fold(0.0, f64::max);
        let mut residual_max = 0.0f64;
        let mut rss = 0.0f64;
        let mut dz_max = 0.0f64;
        let mut dt_max = 0.0f64;
        let mut integral = 0.0f64;
        let mut count = 0usize;
        let r33 = &snap.rho33_avg;
        let wide = snap.flux_prev2.as_ref().zip(snap.flux_next2.as_ref());
        for i in 2..n - 2 {
            let dz_term = match wide {
                Some((fp2, fn2)) => {
                    (-fn2[i] + 8.0 * fn_[i] - 8.0 * fp[i] + fp2[i]) / (12.0 * snap.dz)
                }
                None => (fn_[i] - fp[i]) / (2.0 * snap.dz),
            };
            let dt_term = 2.0 * mu
                * (-r33[i + 2] + 8.0 * r33[i + 1] - 8.0 * r33[i - 1] + r33[i - 2])
                / (12.0 * dt);
            let r = dz_term + dt_term;
            residual_max = residual_max.max(r.abs());
            rss += r * r;
            dz_max = dz_max.max(dz_term.abs());
            dt_max = dt_max.max(dt_term.abs());
            integral += r * dt;
            count += 1;
        }
        let term_scale = dz_max.max(dt_max);
        out.push(PoyntingReport {
            z: snap.z,
            residual_max,
            residual_rms: if count > 0 { (rss / count as f64).sqrt() } else { 0.0 },
            dz_term_max: dz_max,
            dt_term_max: dt_max,
            normalized_max: if term_scale > 0.0 { residual_max / term_scale } else { 0.0 },
            flux_normalized_max: if peak_flux > 0.0 { residual_max / peak_flux } else { 0.0 },
            integrated_per_step: if peak_flux > 0.0 {
                integral.abs() * snap.dz / peak_flux
            } else {
                0.0
            },
            peak_flux,
        });
    }
    out
}

/// Max relative pointwise drift of |Wa|^2 + |Wb|^2 across stations; the
/// reduced solver conserves it exactly.
pub fn manley_rowe_residual(entry_flux: &[f64], snapshots: &[Snapshot]) -> f64 {
    let peak = entry_flux.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for snap in snapshots {
        for (a, b) in snap.fields.flux().iter().zip(entry_flux) {
            worst = worst.max((a - b).abs() / peak);
        }
    }
    worst
}

/// Count local maxima of |envelope| above `threshold_fraction` of the global
/// peak. Plateaus (runs of equal samples) count once.
pub fn peak_count(envelope: &[C64], threshold_fraction: f64) -> usize {
    let mags: Vec<f64> = envelope.iter().map(|v| v.norm()).collect();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return 0;
    }
    let threshold = threshold_fraction * peak;
    let eps = 1e-12 * peak;
    let mut count = 0usize;
    let mut rising = false;
    let mut plateau_value = mags[0];
    for i in 1..mags.len() {
        let d = mags[i] - plateau_value;
        if d > eps {
            rising = true;
            plateau_value = mags[i];
        } else if d < -eps {
            if rising && plateau_value > threshold {
                count += 1;
            }
            rising = false;
            plateau_value = mags[i];
        }
        // within eps: extend the plateau
    }
    count
}

/// Result of a least-squares envelope fit.
#[derive(Debug, Clone, Copy)]
pub struct EnvelopeFit {
    pub amplitude: f64,
    pub width: f64,
    pub center: f64,
    /// Mean |d ln|W| / dT| measured where |W| lies in [1e-4, 1e-2] of the
    /// peak; 1/width for an exact sech. NaN when the tails are not sampled.
    pub tail_log_slope: f64,
    /// Root-mean-square misfit in the units of the envelope.
    pub rms_misfit: f64,
}

fn sech(x: f64) -> f64 {
    2.0 / (x.exp() + (-x).exp())
}

fn levenberg_marquardt(
    mags: &[f64],
    t_axis: &[f64],
    mut params: [f64; 3],
    model: impl Fn(f64, &[f64; 3]) -> (f64, [f64; 3]),
) -> [f64; 3] {
    let mut lambda = 1e-3;
    let chi2 = |p: &[f64; 3]| -> f64 {
        t_axis.iter().zip(mags).map(|(&t, &m)| (m - model(t, p).0).powi(2)).sum()
    };
    let mut best = chi2(&params);
    for _ in 0..100 {
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for (&t, &m) in t_axis.iter().zip(mags) {
            let (value, grad) = model(t, &params);
            let r = m - value;
            for a in 0..3 {
                jtr[a] += grad[a] * r;
                for b in 0..3 {
                    jtj[a][b] += grad[a] * grad[b];
                }
            }
        }
        // Solve (JtJ + lambda diag) step = Jtr by Gaussian elimination.
        let mut a = jtj;
        for d in 0..3 {
            a[d][d] *= 1.0 + lambda;
        }
        let mut rhs = jtr;
        let mut ok = true;
        for col in 0..3 {
            let mut piv = col;
            for r in col + 1..3 {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if a[piv][col].abs() < 1e-300 {
                ok = false;
                break;
            }
            a.swap(col, piv);
            rhs.swap(col, piv);
            for r in col + 1..3 {
                let f = a[r][col] / a[col][col];
                for c in col..3 {
                    a[r][c] -= f * a[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
        if !ok {
            break;
        }
        let mut step = [0.0f64; 3];
        for r in (0..3).rev() {
            let mut acc = rhs[r];
            for c in r + 1..3 {
                acc -= a[r][c] * step[c];
            }
            step[r] = acc / a[r][r];
        }
        let trial = [params[0] + step[0], params[1] + step[1], params[2] + step[2]];
        if trial[2] <= 0.0 {
            lambda *= 10.0;
            continue;
        }
        let trial_chi2 = chi2(&trial);
        if trial_chi2 < best {
            let gain = best - trial_chi2;
            params = trial;
            best = trial_chi2;
            lambda = (lambda * 0.3).max(1e-12);
            if gain < 1e-16 * best.max(1e-300) {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    params
}

fn tail_slope(mags: &[f64], t_axis: &[f64], center: f64, peak: f64) -> f64 {
    let lo = 1e-4 * peak;
    let hi = 1e-2 * peak;
    let mut slopes = Vec::new();
    for side in 0..2 {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (&t, &m) in t_axis.iter().zip(mags) {
            let in_side = if side == 0 { t < center } else { t > center };
            if in_side && m >= lo && m <= hi {
                xs.push(t);
                ys.push(m.ln());
            }
        }
        if xs.len() >= 3 {
            let (slope, _) = linear_fit(&xs, &ys);
            slopes.push(slope.abs());
        }
    }
    if slopes.is_empty() {
        f64::NAN
    } else {
        slopes.iter().sum::<f64>() / slopes.len() as f64
    }
}

fn fit_envelope(
    envelope: &[C64],
    t_axis: &[f64],
    model: impl Fn(f64, &[f64; 3]) -> (f64, [f64; 3]) + Copy,
    width_from_fwhm: f64,
) -> Result<EnvelopeFit> {
    let peaks = peak_count(envelope, 0.1);
    if peaks != 1 {
        return Err(Error::NotSinglePulse { peaks });
    }
    let mags: Vec<f64> = envelope.iter().map(|v| v.norm()).collect();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    let center0 = refined_peak_position(t_axis, &mags);
    // Full width at half maximum from threshold crossings.
    let half = 0.5 * peak;
    let first = t_axis.iter().zip(&mags).find(|(_, &m)| m >= half).map(|(&t, _)| t);
    let last = t_axis.iter().zip(&mags).rev().find(|(_, &m)| m >= half).map(|(&t, _)| t);
    let fwhm = match (first, last) {
        (Some(a), Some(b)) if b > a => b - a,
        _ => (t_axis[t_axis.len() - 1] - t_axis[0]) / 4.0,
    };
    let params =
        levenberg_marquardt(&mags, t_axis, [peak, center0, fwhm / width_from_fwhm], model);
    let [amplitude, center, width] = params;
    let rss: f64 =
        t_axis.iter().zip(&mags).map(|(&t, &m)| (m - model(t, &params).0).powi(2)).sum();
    Ok(EnvelopeFit {
        amplitude,
        width,
        center,
        tail_log_slope: tail_slope(&mags, t_axis, center, peak),
        rms_misfit: (rss / mags.len() as f64).sqrt(),
    })
}

/// Least-squares fit of A sech((T - T0)/w) to |envelope|.
pub fn fit_sech(envelope: &[C64], t_axis: &[f64]) -> Result<EnvelopeFit> {
    let model = |t: f64, p: &[f64; 3]| -> (f64, [f64; 3]) {
        let x = (t - p[1]) / p[2];
        let s = sech(x);
        let tanh = x.tanh();
        (p[0] * s, [s, p[0] * s * tanh / p[2], p[0] * s * tanh * x / p[2]])
    };
    fit_envelope(envelope, t_axis, model, 2.0 * (2.0 + 3.0f64.sqrt()).ln())
}

/// Least-squares fit of A exp(-(T - T0)^2 / 2 w^2) to |envelope|.
pub fn fit_gaussian(envelope: &[C64], t_axis: &[f64]) -> Result<EnvelopeFit> {
    let model = |t: f64, p: &[f64; 3]| -> (f64, [f64; 3]) {
        let x = (t - p[1]) / p[2];
        let g = (-0.5 * x * x).exp();
        (p[0] * g, [g, p[0] * g * x / p[2], p[0] * g * x * x / p[2]])
    };
    fit_envelope(envelope, t_axis, model, 2.0 * (2.0 * 2.0f64.ln()).sqrt())
}

/// Envelope selector for peak-tracking diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackChannel {
    Pump,
    Stokes,
}

/// Drift rate dT/dZ of the envelope peak across the stations, from a linear
/// regression of the refined peak positions.
pub fn group_velocity(
    snapshots: &[Snapshot],
    t_axis: &[f64],
    channel: TrackChannel,
) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(Error::InvalidParameter(
            "group velocity needs at least two stations".into(),
        ));
    }
    let mut zs = Vec::with_capacity(snapshots.len());
    let mut peaks = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        let env = match channel {
            TrackChannel::Pump => &snap.fields.omega_a,
            TrackChannel::Stokes => &snap.fields.omega_b,
        };
        let mags: Vec<f64> = env.iter().map(|v| v.norm()).collect();
        zs.push(snap.z);
        peaks.push(refined_peak_position(t_axis, &mags));
    }
    let (slope, _) = linear_fit(&zs, &peaks);
    Ok(slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::AnalyticSolution;
    use crate::grid::make_doppler_quadrature;
    use crate::medium::{LineShape, Occupancy};
    use crate::util::linspace;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn sech_envelope(t_axis: &[f64], tau: f64) -> Vec<C64> {
        t_axis.iter().map(|&t| C64::new(2.0 / tau * sech(t / tau), 0.0)).collect()
    }

    fn test_solution(alpha2: f64) -> AnalyticSolution {
        let prep = MediumPrep::new(
            alpha2,
            1.0 - alpha2,
            10.0,
            LineShape::Sharp,
            202.0,
            Occupancy::Everywhere,
        )
        .unwrap();
        let quad = make_doppler_quadrature(10.0, LineShape::Sharp, 1).unwrap();
        AnalyticSolution::new(prep, 1.0, quad).unwrap()
    }

    #[test]
    fn sech_area_is_two_pi() {
        let axis = linspace(-16.0, 16.0, 1601);
        let env = sech_envelope(&axis, 1.0);
        assert_relative_eq!(pulse_area(&env, &axis), 2.0 * PI, epsilon = 1e-6);
        let zeros = vec![C64::new(0.0, 0.0); axis.len()];
        assert_eq!(pulse_area(&zeros, &axis), 0.0);
    }

    #[test]
    fn analytic_envelope_areas_follow_theory() {
        let sol = test_solution(0.8);
        let axis = linspace(-20.0, 20.0, 2001);
        for &z in &[0.0, 0.8, -1.5] {
            let env_a: Vec<C64> = axis.iter().map(|&t| sol.fields(z, t).0).collect();
            let env_b: Vec<C64> = axis.iter().map(|&t| sol.fields(z, t).1).collect();
            let theory = theoretical_areas(&sol.prep, &sol.coeffs, z);
            assert_relative_eq!(pulse_area(&env_a, &axis), theory.theta_a, epsilon = 1e-6);
            assert_relative_eq!(pulse_area(&env_b, &axis), theory.theta_b, epsilon = 1e-6);
        }
        // Z = 0 closed form: both areas are 2 pi / sqrt(2).
        let at0 = theoretical_areas(&sol.prep, &sol.coeffs, 0.0);
        assert_relative_eq!(at0.theta_a, PI * 2.0f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(at0.theta_b, PI * 2.0f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn theoretical_total_area_is_exact() {
        let sol = test_solution(0.8);
        // Deep in the output regime theta_a collapses exponentially.
        let z10 = 10.0 / (sol.prep.inversion() * sol.coeffs.kappa);
        let far = theoretical_areas(&sol.prep, &sol.coeffs, z10);
        assert_relative_eq!(far.theta_a, 2.8526e-4, max_relative = 1e-4);
        assert_relative_eq!(far.theta_b, 2.0 * PI, max_relative = 1e-8);
        for &z in &[-1e6, -12.0, 0.0, 3.0, 1e6] {
            let r = theoretical_areas(&sol.prep, &sol.coeffs, z);
            assert_relative_eq!(r.theta_total, 2.0 * PI, epsilon = 1e-12);
        }
    }

    #[test]
    fn transfer_lengths_match_closed_form() {
        let quad = make_doppler_quadrature(10.0, LineShape::Sharp, 1).unwrap();
        let seed = 0.005 * PI;
        let cases = [(1.0, 5.991_461_422_098), (0.8, 9.985_769_036_830), (0.6, 29.957_307_110_49)];
        for &(alpha2, expect) in &cases {
            let prep = MediumPrep::new(
                alpha2,
                1.0 - alpha2,
                10.0,
                LineShape::Sharp,
                202.0,
                Occupancy::Everywhere,
            )
            .unwrap();
            let coeffs =
                crate::analytic::compute_kappa_delta(&prep, 1.0, &quad).unwrap();
            let zt = transfer_length(&prep, &coeffs, seed).unwrap();
            assert_relative_eq!(zt * coeffs.kappa, expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn transfer_length_antisymmetric_under_swap() {
        let quad = make_doppler_quadrature(10.0, LineShape::Sharp, 1).unwrap();
        let prep = MediumPrep::new(
            0.8,
            0.2,
            10.0,
            LineShape::Sharp,
            202.0,
            Occupancy::Everywhere,
        )
        .unwrap();
        let swapped = MediumPrep::new(
            0.2,
            0.8,
            10.0,
            LineShape::Sharp,
            202.0,
            Occupancy::Everywhere,
        )
        .unwrap();
        let coeffs = crate::analytic::compute_kappa_delta(&prep, 1.0, &quad).unwrap();
        let zt = transfer_length(&prep, &coeffs, 0.01).unwrap();
        let zt_swapped = transfer_length(&swapped, &coeffs, 0.01).unwrap();
        assert_relative_eq!(zt, -zt_swapped, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inversion_is_rejected() {
        let quad = make_doppler_quadrature(10.0, LineShape::Sharp, 1).unwrap();
        let prep = MediumPrep::new(
            0.5,
            0.5,
            10.0,
            LineShape::Sharp,
            202.0,
            Occupancy::Everywhere,
        )
        .unwrap();
        let coeffs = crate::analytic::compute_kappa_delta(&prep, 1.0, &quad).unwrap();
        assert!(matches!(
            transfer_length(&prep, &coeffs, 0.01),
            Err(Error::DegenerateInversion)
        ));
        assert!(transfer_length(&test_solution(1.0).prep, &coeffs, 7.0).is_err());
    }

    #[test]
    fn sech_fit_recovers_parameters() {
        let axis = linspace(-14.0, 14.0, 1401);
        let env: Vec<C64> =
            axis.iter().map(|&t| C64::from_polar(1.7 * sech((t - 0.4) / 1.3), 0.3)).collect();
        let fit = fit_sech(&env, &axis).unwrap();
        assert_relative_eq!(fit.amplitude, 1.7, epsilon = 1e-8);
        assert_relative_eq!(fit.center, 0.4, epsilon = 1e-8);
        assert_relative_eq!(fit.width, 1.3, epsilon = 1e-6);
        assert_relative_eq!(fit.tail_log_slope, 1.0 / 1.3, max_relative = 1e-2);
        assert!(fit.rms_misfit < 1e-10);
    }

    #[test]
    fn fit_discriminates_gaussian_from_sech() {
        let axis = linspace(-10.0, 10.0, 1001);
        let env: Vec<C64> =
            axis.iter().map(|&t| C64::new(2.0 * (-0.5 * t * t).exp(), 0.0)).collect();
        let sech_fit = fit_sech(&env, &axis).unwrap();
        let gauss_fit = fit_gaussian(&env, &axis).unwrap();
        assert!(gauss_fit.rms_misfit < 1e-10);
        assert!(sech_fit.rms_misfit > 100.0 * gauss_fit.rms_misfit.max(1e-12));
    }

    #[test]
    fn multi_peak_envelope_is_rejected_by_fit() {
        let axis = linspace(-20.0, 20.0, 2001);
        let env: Vec<C64> = axis
            .iter()
            .map(|&t| C64::new(sech(t - 6.0) + sech(t + 6.0), 0.0))
            .collect();
        match fit_sech(&env, &axis) {
            Err(Error::NotSinglePulse { peaks }) => assert_eq!(peaks, 2),
            other => panic!("expected NotSinglePulse, got {other:?}"),
        }
    }

    #[test]
    fn peak_counting() {
        let axis = linspace(-20.0, 20.0, 2001);
        let one: Vec<C64> = sech_envelope(&axis, 1.0);
        assert_eq!(peak_count(&one, 0.1), 1);
        let two: Vec<C64> = axis
            .iter()
            .map(|&t| C64::new(sech(t - 6.0) + 0.7 * sech(t + 6.0), 0.0))
            .collect();
        assert_eq!(peak_count(&two, 0.1), 2);
        // The smaller bump falls below a higher threshold.
        assert_eq!(peak_count(&two, 0.8), 1);
        // A flat-topped pulse counts once.
        let flat: Vec<C64> = axis
            .iter()
            .map(|&t| C64::new(sech(t).min(0.8), 0.0))
            .collect();
        assert_eq!(peak_count(&flat, 0.1), 1);
        let zeros = vec![C64::new(0.0, 0.0); 100];
        assert_eq!(peak_count(&zeros, 0.1), 0);
    }

    #[test]
    fn group_velocity_from_analytic_stations() {
        use crate::maxwell::Snapshot;
        let axis = linspace(-24.0, 6.0, 1501);
        for &alpha2 in &[1.0, 0.5] {
            let sol = test_solution(alpha2);
            let kappa = sol.coeffs.kappa;
            let snaps: Vec<Snapshot> = (0..5)
                .map(|i| {
                    let z = (-14.0 + i as f64) / kappa;
                    Snapshot {
                        step: i,
                        z,
                        fields: crate::field::FieldState {
                            omega_a: axis.iter().map(|&t| sol.fields(z, t).0).collect(),
                            omega_b: axis.iter().map(|&t| sol.fields(z, t).1).collect(),
                            z_position: z,
                        },
                        rho33_avg: vec![0.0; axis.len()],
                        in_medium: true,
                        flux_prev: None,
                        flux_next: None,
                        flux_prev2: None,
                        flux_next2: None,
                        dz: 1.0,
                    }
                })
                .collect();
            let slope = group_velocity(&snaps, &axis, TrackChannel::Pump).unwrap();
            let expect = alpha2 * kappa * 1.0;
            assert_relative_eq!(slope, expect, max_relative = 0.02);
        }
        // Output Stokes for the pure state does not drift.
        let sol = test_solution(1.0);
        let axis_out = linspace(-8.0, 8.0, 801);
        let snaps: Vec<Snapshot> = (0..5)
            .map(|i| {
                let z = (10.0 + i as f64) / sol.coeffs.kappa;
                Snapshot {
                    step: i,
                    z,
                    fields: crate::field::FieldState {
                        omega_a: axis_out.iter().map(|&t| sol.fields(z, t).0).collect(),
                        omega_b: axis_out.iter().map(|&t| sol.fields(z, t).1).collect(),
                        z_position: z,
                    },
                    rho33_avg: vec![0.0; axis_out.len()],
                    in_medium: true,
                    flux_prev: None,
                    flux_next: None,
                    flux_prev2: None,
                    flux_next2: None,
                    dz: 1.0,
                }
            })
            .collect();
        let slope = group_velocity(&snaps, &axis_out, TrackChannel::Stokes).unwrap();
        assert!(slope.abs() < 0.02 * sol.coeffs.kappa);
    }

    #[test]
    fn vacuum_poynting_residual_is_zero() {
        use crate::field::FieldState;
        let n = 64;
        let snap = Snapshot {
            step: 1,
            z: 0.5,
            fields: FieldState {
                omega_a: vec![C64::new(0.0, 0.0); n],
                omega_b: vec![C64::new(0.0, 0.0); n],
                z_position: 0.5,
            },
            rho33_avg: vec![0.0; n],
            in_medium: false,
            flux_prev: Some(vec![0.0; n]),
            flux_next: Some(vec![0.0; n]),
            flux_prev2: None,
            flux_next2: None,
            dz: 0.1,
        };
        let reports = poynting_residual(&[snap], 0.02, 202.0);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].residual_max, 0.0);
        assert_eq!(reports[0].normalized_max, 0.0);
    }
}
