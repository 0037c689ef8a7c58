//! Discretization: retarded-time axis, propagation axis and the detuning
//! quadrature used for inhomogeneous averages.

use crate::error::{Error, Result};
use crate::medium::LineShape;
use crate::util::linspace;

/// One atom-class detuning and its statistical weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerNode {
    pub detuning: f64,
    pub weight: f64,
}

/// Gauss-Hermite nodes and weights for averaging over the Gaussian detuning
/// distribution centred at `delta_bar` with width `1/t2_star`.
///
/// Weights sum to one. The sharp line returns the single node
/// `(delta_bar, 1)`; `n_nodes` must then be 1.
pub fn make_doppler_quadrature(
    delta_bar: f64,
    line: LineShape,
    n_nodes: usize,
) -> Result<Vec<DopplerNode>> {
    if n_nodes < 1 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    match line {
        LineShape::Sharp => {
            if n_nodes != 1 {
                return Err(Error::InvalidParameter(format!(
                    "sharp line admits exactly one detuning class (asked for {n_nodes})"
                )));
            }
            Ok(vec![DopplerNode { detuning: delta_bar, weight: 1.0 }])
        }
        LineShape::Gaussian { t2_star } => {
            if t2_star <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "t2_star must be positive (got {t2_star})"
                )));
            }
            let gh = gauss_hermite(n_nodes)?;
            let scale = std::f64::consts::SQRT_2 / t2_star;
            let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
            Ok(gh
                .into_iter()
                .map(|(x, w)| DopplerNode {
                    detuning: delta_bar + scale * x,
                    weight: w * inv_sqrt_pi,
                })
                .collect())
        }
    }
}

/// Nodes and weights of n-point Gauss-Hermite quadrature for weight
/// exp(-x^2), found by Newton iteration on the orthonormal Hermite
/// recurrence (well conditioned up to a few hundred nodes).
fn gauss_hermite(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidParameter("gauss_hermite order must be >= 1".into()));
    }
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    // Positive roots in descending order, kept for the initial guesses.
    let mut found = vec![0.0f64; m];
    let mut z = 0.0f64;
    for i in 0..m {
        // Asymptotic initial guesses, walking inward from the largest root.
        z = match i {
            0 => {
                let a = (2 * n + 1) as f64;
                a.sqrt() - 1.85575 * a.powf(-1.0 / 6.0)
            }
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * found[0],
            3 => 1.91 * z - 0.91 * found[1],
            _ => 2.0 * z - found[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..200 {
            // Orthonormal Hermite values: p1 = h_n(z), p2 = h_{n-1}(z).
            let mut p1 = std::f64::consts::PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - (((j - 1) as f64) / j as f64).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::InvalidParameter(format!(
                "gauss_hermite failed to converge for n = {n}"
            )));
        }
        found[i] = z;
        nodes[i] = -z; // fill ascending: most negative first
        nodes[n - 1 - i] = z;
        let w = 2.0 / (pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(nodes.into_iter().zip(weights).collect())
}

/// Discretization of one experiment: retarded-time samples, propagation
/// steps and the detuning quadrature.
#[derive(Debug, Clone)]
pub struct SimulationGrid {
    pub t_min: f64,
    pub t_max: f64,
    /// Number of retarded-time samples (>= 2).
    pub n_t: usize,
    pub z_min: f64,
    pub z_max: f64,
    /// Number of propagation steps (>= 1); the axis has `n_z + 1` points.
    pub n_z: usize,
    pub doppler: Vec<DopplerNode>,
}

impl SimulationGrid {
    pub fn new(
        t_min: f64,
        t_max: f64,
        n_t: usize,
        z_min: f64,
        z_max: f64,
        n_z: usize,
        doppler: Vec<DopplerNode>,
    ) -> Result<Self> {
        if n_t < 2 {
            return Err(Error::InvalidParameter(format!("n_t must be >= 2 (got {n_t})")));
        }
        if n_z < 1 {
            return Err(Error::InvalidParameter(format!("n_z must be >= 1 (got {n_z})")));
        }
        if t_max <= t_min {
            return Err(Error::InvalidParameter(format!(
                "time axis must be increasing (t_min={t_min}, t_max={t_max})"
            )));
        }
        if z_max <= z_min {
            return Err(Error::InvalidParameter(format!(
                "propagation axis must be increasing (z_min={z_min}, z_max={z_max})"
            )));
        }
        let wsum: f64 = doppler.iter().map(|n| n.weight).sum();
        if doppler.is_empty() || (wsum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "doppler weights must sum to 1 (got {wsum} over {} nodes)",
                doppler.len()
            )));
        }
        Ok(Self { t_min, t_max, n_t, z_min, z_max, n_z, doppler })
    }

    pub fn t_axis(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.n_t)
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / self.n_z as f64
    }

    /// Weighted average of `f(detuning)` over the quadrature.
    pub fn doppler_average<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.doppler.iter().map(|n| n.weight * f(n.detuning)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Adaptive Simpson quadrature, used as an independent oracle for the
    /// Gauss-Hermite averages.
    pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn recurse<F: Fn(f64) -> f64>(
            f: &F,
            a: f64,
            b: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, m);
            let right = simpson(f, m, b);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, m, left, tol / 2.0, depth - 1)
                    + recurse(f, m, b, right, tol / 2.0, depth - 1)
            }
        }
        let whole = simpson(&f, a, b);
        recurse(&f, a, b, whole, tol, 48)
    }

    #[test]
    fn sharp_line_single_node() {
        let q = make_doppler_quadrature(0.0, LineShape::Sharp, 1).unwrap();
        assert_eq!(q, vec![DopplerNode { detuning: 0.0, weight: 1.0 }]);
        assert!(make_doppler_quadrature(0.0, LineShape::Sharp, 4).is_err());
    }

    #[test]
    fn weights_positive_and_normalized() {
        for n in [1usize, 2, 3, 7, 16, 32, 64, 128] {
            let q =
                make_doppler_quadrature(3.0, LineShape::Gaussian { t2_star: 0.5 }, n).unwrap();
            assert_eq!(q.len(), n);
            assert!(q.iter().all(|node| node.weight > 0.0));
            let sum: f64 = q.iter().map(|node| node.weight).sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussian_moments_reproduced() {
        let (delta_bar, t2) = (10.0, 0.7);
        let q = make_doppler_quadrature(delta_bar, LineShape::Gaussian { t2_star: t2 }, 24)
            .unwrap();
        let mean: f64 = q.iter().map(|n| n.weight * n.detuning).sum();
        let var: f64 = q.iter().map(|n| n.weight * (n.detuning - delta_bar).powi(2)).sum();
        assert_relative_eq!(mean, delta_bar, epsilon = 1e-10);
        assert_relative_eq!(var, 1.0 / (t2 * t2), epsilon = 1e-10);
    }

    #[test]
    fn lorentzian_average_matches_adaptive_quadrature() {
        // <1/(1 + (Delta tau)^2)> over F(Delta) at line centre 10/tau, tau = 1.
        let (delta_bar, t2, tau) = (10.0, 2.0, 1.0);
        let q = make_doppler_quadrature(delta_bar, LineShape::Gaussian { t2_star: t2 }, 32)
            .unwrap();
        let got: f64 =
            q.iter().map(|n| n.weight / (n.detuning * n.detuning * tau * tau + 1.0)).sum();
        let f = |d: f64| {
            let g = t2 / (2.0 * std::f64::consts::PI).sqrt()
                * (-0.5 * (d - delta_bar) * (d - delta_bar) * t2 * t2).exp();
            g / (d * d * tau * tau + 1.0)
        };
        let span = 10.0 / t2;
        let oracle = adaptive_simpson(f, delta_bar - span, delta_bar + span, 1e-13);
        assert_relative_eq!(got, oracle, max_relative = 1e-8);
    }

    #[test]
    fn grid_validation() {
        let dop = vec![DopplerNode { detuning: 0.0, weight: 1.0 }];
        assert!(SimulationGrid::new(0.0, 1.0, 2, 0.0, 1.0, 1, dop.clone()).is_ok());
        assert!(SimulationGrid::new(0.0, 1.0, 1, 0.0, 1.0, 1, dop.clone()).is_err());
        assert!(SimulationGrid::new(1.0, 0.0, 8, 0.0, 1.0, 1, dop.clone()).is_err());
        let bad = vec![DopplerNode { detuning: 0.0, weight: 0.7 }];
        assert!(SimulationGrid::new(0.0, 1.0, 8, 0.0, 1.0, 1, bad).is_err());
    }
}
