//! Medium preparation: ground-state populations, line shape, coupling and
//! spatial extent.

use crate::density::DensityMatrix3;
use crate::error::{Error, Result};

/// Spatial occupancy of the medium along the propagation axis, piecewise
/// constant with explicit entry and exit faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Occupancy {
    /// Medium fills the whole axis (used by the analytic solutions, which
    /// assume an unbounded medium).
    Everywhere,
    /// Medium occupies `entry <= z < exit`; vacuum elsewhere.
    Slab { entry: f64, exit: f64 },
}

impl Occupancy {
    pub fn contains(&self, z: f64) -> bool {
        match *self {
            Occupancy::Everywhere => true,
            Occupancy::Slab { entry, exit } => z >= entry && z < exit,
        }
    }
}

/// Line-shape description: a sharp line is a first-class case rather than a
/// small-width limit of the Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineShape {
    /// Delta-function line: every atom sits at the line-center detuning.
    Sharp,
    /// Gaussian distribution of detunings with 1/e^(1/2) width `1/t2_star`.
    Gaussian { t2_star: f64 },
}

/// Preparation of the lambda medium.
///
/// All quantities are dimensionless: times in units of the reference pulse
/// width, detunings and Rabi frequencies in its inverse, and the coupling
/// `mu` in inverse time per unit propagation length (so that
/// dOmega/dZ = -i mu rho has consistent units).
#[derive(Debug, Clone, Copy)]
pub struct MediumPrep {
    /// Population of ground level 1.
    pub alpha2: f64,
    /// Population of ground level 2.
    pub beta2: f64,
    /// Line-center one-photon detuning of both fields.
    pub delta_bar: f64,
    /// Inhomogeneous line shape.
    pub line: LineShape,
    /// Atom-field coupling (common to both transitions).
    pub mu: f64,
    /// Spatial extent of the medium.
    pub occupancy: Occupancy,
}

impl MediumPrep {
    pub fn new(
        alpha2: f64,
        beta2: f64,
        delta_bar: f64,
        line: LineShape,
        mu: f64,
        occupancy: Occupancy,
    ) -> Result<Self> {
        if alpha2 < 0.0 || beta2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ground populations must be non-negative (alpha2={alpha2}, beta2={beta2})"
            )));
        }
        if (alpha2 + beta2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "alpha2 + beta2 must equal 1 (got {})",
                alpha2 + beta2
            )));
        }
        if let LineShape::Gaussian { t2_star } = line {
            if t2_star <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "t2_star must be positive (got {t2_star}); use the sharp line for a delta-function profile"
                )));
            }
        }
        if mu <= 0.0 {
            return Err(Error::InvalidParameter(format!("mu must be positive (got {mu})")));
        }
        Ok(Self { alpha2, beta2, delta_bar, line, mu, occupancy })
    }

    /// Pure-state medium (all population in level 1) with a sharp line,
    /// filling all space. Convenient starting point for tests.
    pub fn pure_sharp(delta_bar: f64, mu: f64) -> Self {
        Self::new(1.0, 0.0, delta_bar, LineShape::Sharp, mu, Occupancy::Everywhere).unwrap()
    }

    /// Raman inversion alpha^2 - beta^2.
    pub fn inversion(&self) -> f64 {
        self.alpha2 - self.beta2
    }
}

/// Dephased initial density matrix diag(alpha^2, beta^2, 0).
pub fn initial_density(prep: &MediumPrep) -> DensityMatrix3 {
    DensityMatrix3::diagonal(prep.alpha2, prep.beta2, 0.0)
}
