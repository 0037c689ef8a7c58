//! Small numeric helpers shared across the solver modules.

use num_complex::Complex64 as C64;

/// Evenly spaced samples from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + h * i as f64).collect()
}

/// log(e^a + e^b) without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Trapezoid integral of complex samples on a uniform axis.
pub fn trapezoid_complex(values: &[C64], dt: f64) -> C64 {
    if values.len() < 2 {
        return C64::new(0.0, 0.0);
    }
    let interior: C64 = values[1..values.len() - 1].iter().sum();
    (interior + 0.5 * (values[0] + values[values.len() - 1])) * dt
}

/// Trapezoid integral of real samples on a uniform axis.
pub fn trapezoid_real(values: &[f64], dt: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    (interior + 0.5 * (values[0] + values[values.len() - 1])) * dt
}

/// Least-squares slope and intercept of y against x.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Position of the maximum of sampled `|values|`, refined by fitting a
/// parabola through the peak sample and its neighbours.
pub fn refined_peak_position(t_axis: &[f64], values: &[f64]) -> f64 {
    let (imax, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(ib, vb), (i, &v)| {
            if v > vb {
                (i, v)
            } else {
                (ib, vb)
            }
        });
    if imax == 0 || imax == values.len() - 1 {
        return t_axis[imax];
    }
    let (ym, y0, yp) = (values[imax - 1], values[imax], values[imax + 1]);
    let denom = ym - 2.0 * y0 + yp;
    if denom.abs() < 1e-300 {
        return t_axis[imax];
    }
    let shift = 0.5 * (ym - yp) / denom;
    let dt = t_axis[1] - t_axis[0];
    t_axis[imax] + shift.clamp(-1.0, 1.0) * dt
}

/// Cubic Lagrange interpolation of uniformly sampled complex data.
///
/// Uses the four samples bracketing `t` (one-sided near the ends), which
/// keeps the interpolation error at O(dt^4) so it does not degrade the
/// fourth-order time stepping that consumes it.
pub fn cubic_sample(values: &[C64], t0: f64, dt: f64, t: f64) -> C64 {
    let n = values.len();
    debug_assert!(n >= 2);
    if n < 4 {
        // Too short for a cubic stencil; fall back to linear.
        let x = ((t - t0) / dt).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let f = x - i as f64;
        return values[i] * (1.0 - f) + values[i + 1] * f;
    }
    let x = (t - t0) / dt;
    let i = (x.floor() as isize).clamp(1, n as isize - 3) as usize;
    let xi = x - i as f64;
    if xi.abs() < 1e-12 {
        return values[i];
    }
    let (a, b, c, d) = (values[i - 1], values[i], values[i + 1], values[i + 2]);
    let wa = -xi * (xi - 1.0) * (xi - 2.0) / 6.0;
    let wb = (xi * xi - 1.0) * (xi - 2.0) / 2.0;
    let wc = -xi * (xi + 1.0) * (xi - 2.0) / 2.0;
    let wd = xi * (xi * xi - 1.0) / 6.0;
    a * wa + b * wb + c * wc + d * wd
}
