//! Fully coherent two-pulse (pump/Stokes) propagation in three-level
//! lambda media.
//!
//! The crate couples the von Neumann equations of a three-level atom in the
//! lambda configuration to one-way Maxwell envelope equations in the
//! retarded frame (`T = t - x/c`, `Z = x/c`), with optional Gaussian
//! inhomogeneous broadening handled by Gauss-Hermite quadrature over
//! detuning classes. Everything is dimensionless: times in units of a
//! reference pulse width, Rabi frequencies and detunings in its inverse.
//!
//! Modules:
//! - [`medium`], [`pulse`], [`grid`], [`field`], [`density`]: domain types
//!   and validated constructors.
//! - [`analytic`]: closed-form dressed solutions used as the built-in
//!   oracle (fields, density matrix, asymptotic regimes).
//! - [`bloch`]: RK4 time integration of one detuning class.
//! - [`maxwell`]: midpoint Z-marching of the coupled system.
//! - [`adiabatic`]: the reduced two-level (far-detuned) system.
//! - [`diagnostics`]: pulse areas, transfer length, conservation residuals,
//!   envelope fits, peak counting, group velocities.

#![allow(clippy::needless_range_loop)]

pub mod adiabatic;
pub mod analytic;
pub mod bloch;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod maxwell;
pub mod medium;
pub mod pulse;
pub mod util;

pub use adiabatic::{reduced_bloch_rhs, reduced_propagate, GroundDensityMatrix2};
pub use analytic::{
    analytic_run, backlund_dress, compute_kappa_delta, AnalyticSolution,
    PropagationCoefficients, Regime,
};
pub use bloch::{bloch_rhs, integrate_atom, AtomClassState};
pub use density::DensityMatrix3;
pub use error::{Error, Result};
pub use field::FieldState;
pub use grid::{make_doppler_quadrature, DopplerNode, SimulationGrid};
pub use maxwell::{
    even_stations, polarization, propagate, AreaSample, PolarizationResponse, Propagation,
    Scheme, Snapshot,
};
pub use medium::{initial_density, LineShape, MediumPrep, Occupancy};
pub use pulse::{sample_input_pulse, Channel, PulseShape, PulseSpec, SampledPulse};
