//! Time integration of the three-level equations of motion for one atom
//! class driven by sampled field envelopes.
//!
//! The six independent equations (time derivatives of the populations and
//! of rho_12, rho_13, rho_23; the rest follow by conjugation) are
//!
//! ```text
//! rho_11' =  i (Wa/2) rho_31 - i (Wa*/2) rho_13
//! rho_22' =  i (Wb/2) rho_32 - i (Wb*/2) rho_23
//! rho_33' = -rho_11' - rho_22'
//! rho_12' =  i (Wa/2) rho_32 - i (Wb*/2) rho_13
//! rho_13' =  i D rho_13 - i (Wb/2) rho_12 + i (Wa/2)(rho_33 - rho_11)
//! rho_23' =  i D rho_23 - i (Wa/2) rho_21 + i (Wb/2)(rho_33 - rho_22)
//! ```
//!
//! with D the detuning of the class. Stepping is classical fixed-step RK4
//! with optional per-interval substeps; stage values of the envelopes are
//! cubic-interpolated from the grid samples, which keeps the overall
//! convergence at fourth order in the grid spacing.

use num_complex::Complex64 as C64;

use crate::density::DensityMatrix3;
use crate::error::{Error, Result};
use crate::util::cubic_sample;

/// One detuning class: its density matrix, detuning and quadrature weight.
#[derive(Debug, Clone, Copy)]
pub struct AtomClassState {
    pub rho: DensityMatrix3,
    pub detuning: f64,
    pub weight: f64,
}

impl AtomClassState {
    pub fn new(rho: DensityMatrix3, detuning: f64, weight: f64) -> Result<Self> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "atom class weight must lie in (0, 1] (got {weight})"
            )));
        }
        Ok(Self { rho, detuning, weight })
    }
}

/// Hermitian-packed density matrix used in the integrator hot loop:
/// real populations plus the three upper off-diagonal entries.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rho3 {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub r12: C64,
    pub r13: C64,
    pub r23: C64,
}

impl Rho3 {
    pub(crate) fn from_matrix(m: &DensityMatrix3) -> Self {
        Self {
            d1: m.m[0][0].re,
            d2: m.m[1][1].re,
            d3: m.m[2][2].re,
            r12: m.m[0][1],
            r13: m.m[0][2],
            r23: m.m[1][2],
        }
    }

    pub(crate) fn to_matrix(self) -> DensityMatrix3 {
        let mut out = DensityMatrix3::zero();
        out.m[0][0] = C64::new(self.d1, 0.0);
        out.m[1][1] = C64::new(self.d2, 0.0);
        out.m[2][2] = C64::new(self.d3, 0.0);
        out.m[0][1] = self.r12;
        out.m[1][0] = self.r12.conj();
        out.m[0][2] = self.r13;
        out.m[2][0] = self.r13.conj();
        out.m[1][2] = self.r23;
        out.m[2][1] = self.r23.conj();
        out
    }

    #[inline]
    fn axpy(&mut self, c: f64, rhs: &Rho3) {
        self.d1 += c * rhs.d1;
        self.d2 += c * rhs.d2;
        self.d3 += c * rhs.d3;
        self.r12 += c * rhs.r12;
        self.r13 += c * rhs.r13;
        self.r23 += c * rhs.r23;
    }
}

#[inline]
fn rhs(rho: &Rho3, omega_a: C64, omega_b: C64, detuning: f64) -> Rho3 {
    let i = C64::new(0.0, 1.0);
    let ha = 0.5 * omega_a;
    let hb = 0.5 * omega_b;
    // Populations: rho_11' = i ha rho_31 + c.c. term = 2 Im(ha* rho_13).
    let d1 = 2.0 * (ha.conj() * rho.r13).im;
    let d2 = 2.0 * (hb.conj() * rho.r23).im;
    let d3 = -d1 - d2;
    let r12 = i * (ha * rho.r23.conj() - hb.conj() * rho.r13);
    let r13 = i * (detuning * rho.r13 - hb * rho.r12 + ha * (rho.d3 - rho.d1));
    let r23 = i * (detuning * rho.r23 - ha * rho.r12.conj() + hb * (rho.d3 - rho.d2));
    Rho3 { d1, d2, d3, r12, r13, r23 }
}

/// Time derivative of the density matrix under the given instantaneous
/// drive. The trace of the result vanishes identically and Hermiticity is
/// preserved by construction.
pub fn bloch_rhs(
    rho: &DensityMatrix3,
    omega_a: C64,
    omega_b: C64,
    detuning: f64,
) -> DensityMatrix3 {
    rhs(&Rho3::from_matrix(rho), omega_a, omega_b, detuning).to_matrix()
}

#[inline]
fn rk4_step(
    rho: &Rho3,
    detuning: f64,
    h: f64,
    fields: impl Fn(f64) -> (C64, C64),
    t: f64,
) -> Rho3 {
    let (a0, b0) = fields(t);
    let (am, bm) = fields(t + 0.5 * h);
    let (a1, b1) = fields(t + h);

    let k1 = rhs(rho, a0, b0, detuning);
    let mut y = *rho;
    y.axpy(0.5 * h, &k1);
    let k2 = rhs(&y, am, bm, detuning);
    y = *rho;
    y.axpy(0.5 * h, &k2);
    let k3 = rhs(&y, am, bm, detuning);
    y = *rho;
    y.axpy(h, &k3);
    let k4 = rhs(&y, a1, b1, detuning);

    let mut out = *rho;
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

fn check_axis_and_fields(omega_a: &[C64], omega_b: &[C64], t_axis: &[f64]) -> Result<f64> {
    let n = t_axis.len();
    if n < 2 || omega_a.len() != n || omega_b.len() != n {
        return Err(Error::InvalidParameter(format!(
            "envelopes ({}, {}) must match the time axis ({n})",
            omega_a.len(),
            omega_b.len()
        )));
    }
    let dt = t_axis[1] - t_axis[0];
    if dt <= 0.0 {
        return Err(Error::InvalidParameter("time axis must be increasing".into()));
    }
    for (i, w) in t_axis.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
            return Err(Error::InvalidParameter(format!(
                "time axis must be uniform (irregular spacing at index {i})"
            )));
        }
    }
    for i in 0..n {
        if !(omega_a[i].is_finite() && omega_b[i].is_finite()) {
            return Err(Error::IntegrationFailure {
                t_index: i,
                reason: "non-finite field sample".into(),
            });
        }
    }
    Ok(dt)
}

/// March one atom class across the whole axis, handing the packed state at
/// every grid point to `observe`.
pub(crate) fn march_bloch(
    initial: &AtomClassState,
    omega_a: &[C64],
    omega_b: &[C64],
    t_axis: &[f64],
    substeps: usize,
    mut observe: impl FnMut(usize, &Rho3),
) -> Result<()> {
    if substeps < 1 {
        return Err(Error::InvalidParameter("substeps must be >= 1".into()));
    }
    let dt = check_axis_and_fields(omega_a, omega_b, t_axis)?;
    let t0 = t_axis[0];
    let fields = |t: f64| {
        (cubic_sample(omega_a, t0, dt, t), cubic_sample(omega_b, t0, dt, t))
    };
    let mut rho = Rho3::from_matrix(&initial.rho);
    observe(0, &rho);
    let h = dt / substeps as f64;
    for i in 0..t_axis.len() - 1 {
        let t_base = t_axis[i];
        for k in 0..substeps {
            rho = rk4_step(&rho, initial.detuning, h, fields, t_base + k as f64 * h);
        }
        observe(i + 1, &rho);
    }
    Ok(())
}

/// Integrate one atom class over the axis and return its density matrix at
/// every grid point.
pub fn integrate_atom(
    initial: &AtomClassState,
    omega_a: &[C64],
    omega_b: &[C64],
    t_axis: &[f64],
    substeps: usize,
) -> Result<Vec<DensityMatrix3>> {
    let mut out = Vec::with_capacity(t_axis.len());
    march_bloch(initial, omega_a, omega_b, t_axis, substeps, |_, rho| {
        out.push(rho.to_matrix());
    })?;
    Ok(out)
}
