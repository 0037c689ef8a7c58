//! Input pulse descriptions and their sampled envelopes.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Which transition the pulse drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Pump, coupling levels 1 and 3.
    PumpA,
    /// Stokes, coupling levels 2 and 3.
    StokesB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Sech,
    Gaussian,
}

/// Description of one input envelope.
///
/// `area` is the time integral of the Rabi frequency in radians; both shapes
/// are normalized so the analytic area equals it exactly:
/// gaussian `(area / (width sqrt(2 pi))) exp(-(T-delay)^2 / 2 width^2)`,
/// sech `(area / (pi width)) sech((T-delay)/width)`.
#[derive(Debug, Clone, Copy)]
pub struct PulseSpec {
    pub channel: Channel,
    pub shape: PulseShape,
    pub area: f64,
    pub width: f64,
    pub delay: f64,
    /// Carrier-envelope phase in radians.
    pub phase: f64,
}

impl PulseSpec {
    pub fn new(
        channel: Channel,
        shape: PulseShape,
        area: f64,
        width: f64,
        delay: f64,
        phase: f64,
    ) -> Result<Self> {
        if width <= 0.0 {
            return Err(Error::InvalidParameter(format!("pulse width must be positive (got {width})")));
        }
        if area < 0.0 {
            return Err(Error::InvalidParameter(format!("pulse area must be non-negative (got {area})")));
        }
        Ok(Self { channel, shape, area, width, delay, phase })
    }
}

/// Sampled envelope plus any warning raised while sampling it.
#[derive(Debug, Clone)]
pub struct SampledPulse {
    pub envelope: Vec<C64>,
    /// Set when the axis leaves less than 3 widths of room on either side of
    /// the pulse centre, so the discrete area is visibly truncated.
    pub truncation_warning: Option<String>,
}

/// Sample the envelope of `spec` on the given time axis.
pub fn sample_input_pulse(spec: &PulseSpec, t_axis: &[f64]) -> SampledPulse {
    let phase = C64::from_polar(1.0, spec.phase);
    let tau = spec.width;
    let envelope: Vec<C64> = t_axis
        .iter()
        .map(|&t| {
            let x = (t - spec.delay) / tau;
            let amp = match spec.shape {
                PulseShape::Gaussian => {
                    spec.area / (tau * (2.0 * std::f64::consts::PI).sqrt()) * (-0.5 * x * x).exp()
                }
                PulseShape::Sech => {
                    // sech via exp, stable for large |x|
                    spec.area / (std::f64::consts::PI * tau) * 2.0 / (x.exp() + (-x).exp())
                }
            };
            phase * amp
        })
        .collect();
    let lead = spec.delay - t_axis[0];
    let tail = t_axis[t_axis.len() - 1] - spec.delay;
    let truncation_warning = if spec.area > 0.0 && (lead < 3.0 * tau || tail < 3.0 * tau) {
        Some(format!(
            "axis [{:.3}, {:.3}] leaves only ({:.2}, {:.2}) widths around the pulse at {:.3}; area will be truncated",
            t_axis[0],
            t_axis[t_axis.len() - 1],
            lead / tau,
            tail / tau,
            spec.delay
        ))
    } else {
        None
    };
    SampledPulse { envelope, truncation_warning }
}
