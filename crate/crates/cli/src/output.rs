//! Artifact writers: CSV files with full-precision floats and minimal
//! self-contained SVG plots.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use twopulse::diagnostics::theoretical_areas;
use twopulse::{AreaSample, MediumPrep, PropagationCoefficients, Snapshot};

/// 17 significant digits: enough for bit-exact f64 round trips.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Long-format station dump: one row per (station, time sample).
pub fn write_snapshots_csv(
    path: &Path,
    stations: &[Snapshot],
    t_axis: &[f64],
    kappa: f64,
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "z_kappa,t_over_tau,re_omega_a,im_omega_a,re_omega_b,im_omega_b,rho33_avg"
    )?;
    for snap in stations {
        let zk = fmt_float(kappa * snap.z);
        for (i, &t) in t_axis.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                zk,
                fmt_float(t),
                fmt_float(snap.fields.omega_a[i].re),
                fmt_float(snap.fields.omega_a[i].im),
                fmt_float(snap.fields.omega_b[i].re),
                fmt_float(snap.fields.omega_b[i].im),
                fmt_float(snap.rho33_avg[i]),
            )?;
        }
    }
    w.flush()
}

/// Measured and closed-form area curves along the march. The reference
/// curve is evaluated at Z - `shift` so its seed matches the experiment's
/// entry conditions (shift 0 for the analytic solver).
pub fn write_areas_csv(
    path: &Path,
    areas: &[AreaSample],
    prep: &MediumPrep,
    coeffs: &PropagationCoefficients,
    shift: f64,
    kappa: f64,
) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "z_kappa,theta_a,theta_b,theta_total,theory_theta_a,theory_theta_b")?;
    for a in areas {
        let theory = theoretical_areas(prep, coeffs, a.z - shift);
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_float(kappa * a.z),
            fmt_float(a.theta_a),
            fmt_float(a.theta_b),
            fmt_float(a.theta_a.hypot(a.theta_b)),
            fmt_float(theory.theta_a),
            fmt_float(theory.theta_b),
        )?;
    }
    w.flush()
}

/// Minimal line plot of |W_a| (solid) and |W_b| (dashed) against retarded
/// time at one station. Self-contained SVG, no external tooling.
pub fn write_station_svg(
    path: &Path,
    snap: &Snapshot,
    t_axis: &[f64],
    kappa: f64,
) -> std::io::Result<()> {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 56.0; // margins
    const MR: f64 = 16.0;
    const MT: f64 = 28.0;
    const MB: f64 = 44.0;
    let mags_a: Vec<f64> = snap.fields.omega_a.iter().map(|v| v.norm()).collect();
    let mags_b: Vec<f64> = snap.fields.omega_b.iter().map(|v| v.norm()).collect();
    let peak = mags_a
        .iter()
        .chain(&mags_b)
        .cloned()
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let (t0, t1) = (t_axis[0], t_axis[t_axis.len() - 1]);
    let x = |t: f64| ML + (t - t0) / (t1 - t0) * (W - ML - MR);
    let y = |v: f64| H - MB - v / (1.05 * peak) * (H - MT - MB);
    let polyline = |mags: &[f64]| -> String {
        let mut pts = String::new();
        // Thin the polyline: SVG stays readable and small.
        let stride = (t_axis.len() / 1200).max(1);
        for (i, &t) in t_axis.iter().enumerate().step_by(stride) {
            pts.push_str(&format!("{:.2},{:.2} ", x(t), y(mags[i])));
        }
        pts
    };

    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    )?;
    writeln!(w, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    if snap.in_medium {
        writeln!(
            w,
            r##"<rect x="{ML}" y="{MT}" width="{:.2}" height="{:.2}" fill="#f2f2f2"/>"##,
            W - ML - MR,
            H - MT - MB
        )?;
    }
    // Axes.
    writeln!(
        w,
        r#"<line x1="{ML}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        H - MB,
        W - MR,
        H - MB
    )?;
    writeln!(w, r#"<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{:.2}" stroke="black"/>"#, H - MB)?;
    for k in 0..=4 {
        let t = t0 + (t1 - t0) * k as f64 / 4.0;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{:.1}</text>"#,
            x(t),
            H - MB + 16.0,
            t
        )?;
        let v = 1.05 * peak * k as f64 / 4.0;
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{:.3}</text>"#,
            ML - 6.0,
            y(v) + 4.0,
            v
        )?;
    }
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">retarded time T / tau</text>"#,
        0.5 * (ML + W - MR),
        H - 8.0
    )?;
    writeln!(
        w,
        r#"<text x="{:.2}" y="18" font-size="13" text-anchor="middle">kappa Z = {:.3}   (solid |W_a| pump, dashed |W_b| stokes)</text>"#,
        0.5 * W,
        kappa * snap.z
    )?;
    writeln!(
        w,
        r##"<polyline points="{}" fill="none" stroke="#1f5fbf" stroke-width="1.5"/>"##,
        polyline(&mags_a)
    )?;
    writeln!(
        w,
        r##"<polyline points="{}" fill="none" stroke="#bf3f1f" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
        polyline(&mags_b)
    )?;
    writeln!(w, "</svg>")?;
    w.flush()
}
