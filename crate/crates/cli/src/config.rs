//! Experiment configuration: a strict flat INI dialect.
//!
//! Sections `[medium]`, `[pulse_a]`, `[pulse_b]`, `[grid]`, `[run]` with
//! `key = value` lines; `#` or `;` start a comment. Unknown sections or
//! keys are errors, and validation reports every violation it finds, not
//! just the first. The full schema lives in `docs/config.md`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use twopulse::{
    compute_kappa_delta, make_doppler_quadrature, Channel, DopplerNode, LineShape, MediumPrep,
    Occupancy, PulseShape, PulseSpec, SimulationGrid,
};

/// Which solver an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Full,
    Adiabatic,
    Analytic,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Full => "full",
            SolverKind::Adiabatic => "adiabatic",
            SolverKind::Analytic => "analytic",
        }
    }
}

/// A parsed and validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub alpha2: f64,
    pub beta2: f64,
    pub delta_bar: f64,
    pub line: LineShape,
    /// Coupling given either directly or via a target absorption scale.
    pub coupling: Coupling,
    pub z_entry: Option<f64>,
    pub z_exit: Option<f64>,
    pub pulse_a: PulseSpec,
    pub pulse_b: PulseSpec,
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub n_z: usize,
    pub doppler_nodes: usize,
    pub solver: SolverKind,
    pub stations: usize,
    pub substeps: usize,
    pub area_stride: usize,
    /// Soliton width for the propagation coefficients and oracle curves.
    pub tau: f64,
    pub out_dir: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub enum Coupling {
    Mu(f64),
    /// Choose mu so that the weak-field absorption scale equals this value.
    KappaTarget(f64),
}

/// Medium, quadrature and grid objects realized from a config.
pub struct Realized {
    pub prep: MediumPrep,
    pub grid: SimulationGrid,
    pub quadrature: Vec<DopplerNode>,
}

impl ExperimentConfig {
    /// Resolve the coupling and build the solver-facing objects.
    pub fn realize(&self) -> Result<Realized, String> {
        let occupancy = match (self.z_entry, self.z_exit) {
            (Some(a), Some(b)) => Occupancy::Slab { entry: a, exit: b },
            (None, None) => Occupancy::Everywhere,
            _ => return Err("z_entry and z_exit must be given together".into()),
        };
        let nodes = match self.line {
            LineShape::Sharp => 1,
            LineShape::Gaussian { .. } => self.doppler_nodes,
        };
        let quadrature = make_doppler_quadrature(self.delta_bar, self.line, nodes)
            .map_err(|e| e.to_string())?;
        let mu = match self.coupling {
            Coupling::Mu(mu) => mu,
            Coupling::KappaTarget(kappa) => {
                let probe = MediumPrep::new(
                    self.alpha2,
                    self.beta2,
                    self.delta_bar,
                    self.line,
                    1.0,
                    occupancy,
                )
                .map_err(|e| e.to_string())?;
                let unit = compute_kappa_delta(&probe, self.tau, &quadrature)
                    .map_err(|e| e.to_string())?;
                kappa / unit.kappa
            }
        };
        let prep = MediumPrep::new(self.alpha2, self.beta2, self.delta_bar, self.line, mu, occupancy)
            .map_err(|e| e.to_string())?;
        let grid = SimulationGrid::new(
            self.t_min,
            self.t_max,
            self.n_t,
            self.z_min,
            self.z_max,
            self.n_z,
            quadrature.clone(),
        )
        .map_err(|e| e.to_string())?;
        Ok(Realized { prep, grid, quadrature })
    }
}

struct Section {
    values: BTreeMap<String, (String, usize)>,
}

fn parse_sections(
    text: &str,
    violations: &mut Vec<String>,
) -> BTreeMap<String, Section> {
    const KNOWN: [&str; 5] = ["medium", "pulse_a", "pulse_b", "grid", "run"];
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find(['#', ';']) {
            Some(idx) => &raw[..idx],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_ascii_lowercase();
            if !KNOWN.contains(&name.as_str()) {
                violations.push(format!("line {}: unknown section [{name}]", lineno + 1));
                current = None;
            } else {
                sections.entry(name.clone()).or_insert(Section { values: BTreeMap::new() });
                current = Some(name);
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            violations.push(format!("line {}: expected 'key = value', got '{line}'", lineno + 1));
            continue;
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        match &current {
            None => violations.push(format!(
                "line {}: key '{key}' outside of any section",
                lineno + 1
            )),
            Some(sec) => {
                let section = sections.get_mut(sec).unwrap();
                if section.values.insert(key.clone(), (value, lineno + 1)).is_some() {
                    violations.push(format!(
                        "line {}: duplicate key '{key}' in [{sec}]",
                        lineno + 1
                    ));
                }
            }
        }
    }
    sections
}

struct SectionReader<'a> {
    name: &'a str,
    section: Option<Section>,
    violations: &'a mut Vec<String>,
}

impl<'a> SectionReader<'a> {
    fn take(&mut self, key: &str) -> Option<String> {
        self.section.as_mut().and_then(|s| s.values.remove(key)).map(|(v, _)| v)
    }

    fn f64(&mut self, key: &str) -> Option<f64> {
        let raw = self.take(key)?;
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.violations
                    .push(format!("[{}] {key}: '{raw}' is not a finite number", self.name));
                None
            }
        }
    }

    fn usize(&mut self, key: &str) -> Option<usize> {
        let raw = self.take(key)?;
        match raw.parse::<usize>() {
            Ok(v) => Some(v),
            _ => {
                self.violations
                    .push(format!("[{}] {key}: '{raw}' is not a non-negative integer", self.name));
                None
            }
        }
    }

    fn finish(mut self) {
        if let Some(section) = self.section.take() {
            for (key, (_, lineno)) in section.values {
                self.violations.push(format!(
                    "line {lineno}: unknown key '{key}' in [{}]",
                    self.name
                ));
            }
        }
    }
}

fn pulse_from(
    mut reader: SectionReader<'_>,
    channel: Channel,
    default_area_pi: f64,
) -> Option<PulseSpec> {
    let shape = match reader.take("shape").as_deref() {
        None | Some("gaussian") => PulseShape::Gaussian,
        Some("sech") => PulseShape::Sech,
        Some(other) => {
            reader.violations.push(format!(
                "[{}] shape: '{other}' is not one of gaussian, sech",
                reader.name
            ));
            PulseShape::Gaussian
        }
    };
    let area_rad = reader.f64("area");
    let area_pi = reader.f64("area_pi");
    let area = match (area_rad, area_pi) {
        (Some(_), Some(_)) => {
            reader.violations.push(format!(
                "[{}] give either 'area' (radians) or 'area_pi', not both",
                reader.name
            ));
            default_area_pi * PI
        }
        (Some(rad), None) => rad,
        (None, Some(pi_units)) => pi_units * PI,
        (None, None) => default_area_pi * PI,
    };
    let width = reader.f64("width").unwrap_or(1.0);
    let delay = reader.f64("delay").unwrap_or(0.0);
    let phase = reader.f64("phase").unwrap_or(0.0);
    let spec = match PulseSpec::new(channel, shape, area, width, delay, phase) {
        Ok(spec) => Some(spec),
        Err(e) => {
            reader.violations.push(format!("[{}] {e}", reader.name));
            None
        }
    };
    reader.finish();
    spec
}

/// Parse and validate a configuration, reporting all violations found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<String>> {
    let mut violations = Vec::new();
    let mut sections = parse_sections(text, &mut violations);

    // [medium]
    let mut medium = SectionReader {
        name: "medium",
        section: sections.remove("medium"),
        violations: &mut violations,
    };
    let alpha2 = medium.f64("alpha2").unwrap_or(1.0);
    let beta2 = medium.f64("beta2").unwrap_or(0.0);
    let delta_bar = medium.f64("delta_bar").unwrap_or(10.0);
    let t2_star = medium.f64("t2_star");
    let mu = medium.f64("mu");
    let kappa = medium.f64("kappa");
    let z_entry = medium.f64("z_entry");
    let z_exit = medium.f64("z_exit");
    medium.finish();

    if (alpha2 + beta2 - 1.0).abs() > 1e-12 {
        violations.push(format!(
            "[medium] alpha2 + beta2 must equal 1 (got {})",
            alpha2 + beta2
        ));
    }
    if alpha2 < 0.0 || beta2 < 0.0 {
        violations.push("[medium] populations must be non-negative".into());
    }
    let line = match t2_star {
        None => LineShape::Sharp,
        Some(v) if v > 0.0 => LineShape::Gaussian { t2_star: v },
        Some(v) => {
            violations.push(format!(
                "[medium] t2_star must be positive (got {v}); omit it for a sharp line"
            ));
            LineShape::Sharp
        }
    };
    let coupling = match (mu, kappa) {
        (Some(_), Some(_)) => {
            violations.push("[medium] give either 'mu' or 'kappa', not both".into());
            Coupling::KappaTarget(1.0)
        }
        (Some(m), None) => {
            if m <= 0.0 {
                violations.push(format!("[medium] mu must be positive (got {m})"));
            }
            Coupling::Mu(m)
        }
        (None, Some(k)) => {
            if k <= 0.0 {
                violations.push(format!("[medium] kappa must be positive (got {k})"));
            }
            Coupling::KappaTarget(k)
        }
        (None, None) => Coupling::KappaTarget(1.0),
    };
    match (z_entry, z_exit) {
        (Some(a), Some(b)) if a >= b => {
            violations.push(format!("[medium] z_entry ({a}) must lie before z_exit ({b})"));
        }
        (Some(_), None) | (None, Some(_)) => {
            violations.push("[medium] z_entry and z_exit must be given together".into());
        }
        _ => {}
    }

    // [pulse_a], [pulse_b]
    let pulse_a = pulse_from(
        SectionReader {
            name: "pulse_a",
            section: sections.remove("pulse_a"),
            violations: &mut violations,
        },
        Channel::PumpA,
        1.3,
    );
    let pulse_b = pulse_from(
        SectionReader {
            name: "pulse_b",
            section: sections.remove("pulse_b"),
            violations: &mut violations,
        },
        Channel::StokesB,
        0.005,
    );

    // [grid]
    let mut grid = SectionReader {
        name: "grid",
        section: sections.remove("grid"),
        violations: &mut violations,
    };
    let t_min = grid.f64("t_min").unwrap_or(-8.0);
    let t_max = grid.f64("t_max").unwrap_or(18.0);
    let n_t = grid.usize("n_t").unwrap_or(1301);
    let z_min = grid.f64("z_min").unwrap_or(0.0);
    let z_max = grid.f64("z_max").unwrap_or(40.0);
    let n_z = grid.usize("n_z").unwrap_or(8000);
    let doppler_nodes = grid.usize("doppler_nodes").unwrap_or(32);
    grid.finish();
    if n_t < 2 {
        violations.push(format!("[grid] n_t must be >= 2 (got {n_t})"));
    }
    if n_z < 1 {
        violations.push(format!("[grid] n_z must be >= 1 (got {n_z})"));
    }
    if t_max <= t_min {
        violations.push("[grid] t_max must exceed t_min".into());
    }
    if z_max <= z_min {
        violations.push("[grid] z_max must exceed z_min".into());
    }
    if !(1..=512).contains(&doppler_nodes) {
        violations.push(format!("[grid] doppler_nodes must lie in 1..=512 (got {doppler_nodes})"));
    }

    // [run]
    let mut run = SectionReader {
        name: "run",
        section: sections.remove("run"),
        violations: &mut violations,
    };
    let solver = match run.take("solver").as_deref() {
        None | Some("full") => SolverKind::Full,
        Some("adiabatic") => SolverKind::Adiabatic,
        Some("analytic") => SolverKind::Analytic,
        Some(other) => {
            run.violations.push(format!(
                "[run] solver: '{other}' is not one of full, adiabatic, analytic"
            ));
            SolverKind::Full
        }
    };
    let stations = run.usize("stations").unwrap_or(6);
    let substeps = run.usize("substeps").unwrap_or(1);
    let area_stride = run.usize("area_stride").unwrap_or_else(|| (n_z / 2000).max(1));
    let tau = run.f64("tau").unwrap_or_else(|| pulse_a.map(|p| p.width).unwrap_or(1.0));
    let out_dir = run.take("out_dir");
    let label = run.take("label");
    run.finish();
    if stations < 2 {
        violations.push(format!("[run] stations must be >= 2 (got {stations})"));
    }
    if substeps < 1 {
        violations.push("[run] substeps must be >= 1".into());
    }
    if tau <= 0.0 {
        violations.push(format!("[run] tau must be positive (got {tau})"));
    }
    if solver == SolverKind::Adiabatic {
        if delta_bar == 0.0 {
            violations.push("[run] the adiabatic solver requires delta_bar != 0".into());
        }
        if t2_star.is_some() {
            violations
                .push("[run] the adiabatic solver supports only the sharp line (omit t2_star)".into());
        }
    }

    // Unknown sections were already reported by parse_sections; report any
    // sections that survived (they were recognized but never consumed --
    // cannot happen today, kept as a guard).
    for (name, section) in sections {
        for (key, (_, lineno)) in section.values {
            violations.push(format!("line {lineno}: unknown key '{key}' in [{name}]"));
        }
    }

    let (Some(pulse_a), Some(pulse_b)) = (pulse_a, pulse_b) else {
        return Err(violations);
    };
    if !violations.is_empty() {
        return Err(violations);
    }
    Ok(ExperimentConfig {
        alpha2,
        beta2,
        delta_bar,
        line,
        coupling,
        z_entry,
        z_exit,
        pulse_a,
        pulse_b,
        t_min,
        t_max,
        n_t,
        z_min,
        z_max,
        n_z,
        doppler_nodes,
        solver,
        stations,
        substeps,
        area_stride,
        tau,
        out_dir,
        label,
    })
}
