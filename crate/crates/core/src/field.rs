//! Field envelopes at one propagation position.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Pump and Stokes envelopes sampled on the retarded-time axis at a single
/// propagation position.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub omega_a: Vec<C64>,
    pub omega_b: Vec<C64>,
    pub z_position: f64,
}

impl FieldState {
    pub fn new(omega_a: Vec<C64>, omega_b: Vec<C64>, z_position: f64) -> Result<Self> {
        if omega_a.len() != omega_b.len() {
            return Err(Error::InvalidParameter(format!(
                "envelope lengths differ ({} vs {})",
                omega_a.len(),
                omega_b.len()
            )));
        }
        Ok(Self { omega_a, omega_b, z_position })
    }

    pub fn len(&self) -> usize {
        self.omega_a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_a.is_empty()
    }

    /// |Omega_a|^2 + |Omega_b|^2 per sample.
    pub fn flux(&self) -> Vec<f64> {
        self.omega_a
            .iter()
            .zip(&self.omega_b)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.omega_a
            .iter()
            .chain(&self.omega_b)
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Index of the first non-finite sample in either envelope, if any.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.omega_a
            .iter()
            .zip(&self.omega_b)
            .position(|(a, b)| !(a.is_finite() && b.is_finite()))
    }
}
