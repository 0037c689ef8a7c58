//! Density-matrix value types.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance used by [`DensityMatrix3::validate`] for Hermiticity and trace.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance used by [`DensityMatrix3::validate`] for eigenvalue positivity.
pub const PSD_TOL: f64 = 1e-10;

/// A 3x3 complex matrix, normally a density matrix of one atom class.
///
/// The type itself is a plain value: derivatives and intermediate stage
/// values of the integrator are stored in it too, so the physical
/// invariants (Hermitian, unit trace, positive semidefinite) are checked
/// by [`DensityMatrix3::validate`] rather than enforced on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix3 {
    pub m: [[C64; 3]; 3],
}

impl DensityMatrix3 {
    pub fn zero() -> Self {
        Self { m: [[C64::new(0.0, 0.0); 3]; 3] }
    }

    /// Diagonal matrix with the given real populations.
    pub fn diagonal(p1: f64, p2: f64, p3: f64) -> Self {
        let mut d = Self::zero();
        d.m[0][0] = C64::new(p1, 0.0);
        d.m[1][1] = C64::new(p2, 0.0);
        d.m[2][2] = C64::new(p3, 0.0);
        d
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// tr(rho^2); conserved by the exact evolution of a single atom class.
    pub fn purity(&self) -> f64 {
        let mut p = C64::new(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                p += self.m[i][j] * self.m[j][i];
            }
        }
        p.re
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let mut off = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    off = off.max(self.m[i][j].norm());
                }
            }
        }
        off <= tol
    }

    /// Smallest principal-minor deficit: the most negative value among the
    /// diagonal entries, the 2x2 principal minors, and the determinant. For
    /// a Hermitian matrix all of these are non-negative exactly when the
    /// matrix is positive semidefinite, and unlike the closed-form
    /// eigenvalues this test does not lose precision near degenerate
    /// spectra.
    pub fn psd_deficit(&self) -> f64 {
        let a = &self.m;
        let d = [a[0][0].re, a[1][1].re, a[2][2].re];
        let mut worst = d[0].min(d[1]).min(d[2]);
        let pairs = [(0usize, 1usize), (0, 2), (1, 2)];
        for &(i, j) in &pairs {
            worst = worst.min(d[i] * d[j] - a[i][j].norm_sqr());
        }
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        worst.min(det.re)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    ///
    /// Closed-form solution of the characteristic cubic; accurate to about
    /// 1e-8 near degenerate spectra, which is fine for the diagnostic
    /// sweeps that consume it (use [`Self::psd_deficit`] for tight
    /// positivity checks).
    pub fn hermitian_eigenvalues(&self) -> [f64; 3] {
        let a = self.m;
        let off = a[0][1].norm_sqr() + a[0][2].norm_sqr() + a[1][2].norm_sqr();
        let q = self.trace().re / 3.0;
        let d0 = a[0][0].re - q;
        let d1 = a[1][1].re - q;
        let d2 = a[2][2].re - q;
        let p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * off;
        if p2 <= 1e-300 {
            return [q, q, q];
        }
        let p = (p2 / 6.0).sqrt();
        // B = (A - q I) / p, r = det(B)/2 (real for Hermitian A).
        let b = |i: usize, j: usize| -> C64 {
            if i == j {
                (a[i][j] - C64::new(q, 0.0)) / p
            } else {
                a[i][j] / p
            }
        };
        let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
            - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
            + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        let r = (det.re / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e_hi = q + 2.0 * p * phi.cos();
        let e_lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        let e_mid = 3.0 * q - e_hi - e_lo;
        [e_lo, e_mid, e_hi]
    }

    /// Check the density-matrix invariants: Hermitian and unit trace to
    /// 1e-12, populations in [0, 1], eigenvalues >= -1e-10.
    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            if self.m[i][i].im.abs() > HERMITICITY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "density matrix diagonal entry {} has imaginary part {:e}",
                    i, self.m[i][i].im
                )));
            }
            let d = self.m[i][i].re;
            if !(-HERMITICITY_TOL..=1.0 + HERMITICITY_TOL).contains(&d) {
                return Err(Error::InvalidParameter(format!(
                    "population rho[{i}][{i}] = {d} outside [0, 1]"
                )));
            }
            for j in (i + 1)..3 {
                if (self.m[i][j] - self.m[j][i].conj()).norm() > HERMITICITY_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "density matrix not Hermitian at ({i},{j})"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > HERMITICITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let deficit = self.psd_deficit();
        if deficit < -PSD_TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix not positive semidefinite (principal-minor deficit {:e})",
                deficit
            )));
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] += other.m[i][j];
            }
        }
        out
    }
}
