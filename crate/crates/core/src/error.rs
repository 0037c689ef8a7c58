use thiserror::Error;

/// Errors produced by the solver and diagnostic routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation was given an argument outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The dressing construction only accepts diagonal ground-state
    /// proto-densities with zero proto-fields.
    #[error("unsupported proto-solution: {0}")]
    UnsupportedProto(String),

    /// Non-finite field data reached the time integrator.
    #[error("integration failure at time index {t_index}: {reason}")]
    IntegrationFailure { t_index: usize, reason: String },

    /// A marching step was rejected because the grid cannot resolve it.
    #[error("resolution error at z = {z}: {reason}")]
    Resolution { z: f64, reason: String },

    /// Transfer length is undefined when the ground populations are equal.
    #[error("degenerate inversion: alpha^2 = beta^2 has no finite transfer length")]
    DegenerateInversion,

    /// Envelope fit was asked to run on a multi-peaked pulse.
    #[error("not a single pulse ({peaks} peaks found); run peak_count first")]
    NotSinglePulse { peaks: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
