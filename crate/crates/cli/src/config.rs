//! Line-oriented `key = value` run configuration.
//!
//! Values are resolved in three layers: the selected case's defaults, then
//! the config file, then command-line overrides. All problems found in any
//! layer are reported together.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use vlasov_core::{AdvectionMethod, Boundary, CaseName, CaseSpec, PhaseSpaceGrid, RotationMethod, SchemeKind};

/// Which spatial Fourier modes the run keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeCutoff {
    /// Largest band for which the field waves are stable at the run's step.
    Auto,
    /// Every mode except Nyquist.
    All,
    Fixed(usize),
}

impl ModeCutoff {
    pub fn resolve(self, grid: &PhaseSpaceGrid, scheme: SchemeKind, dt: f64) -> usize {
        let all = (grid.nx - 1) / 2;
        match self {
            ModeCutoff::Auto => scheme.stable_max_mode(grid, dt).max(1),
            ModeCutoff::All => all,
            ModeCutoff::Fixed(m) => m.min(all),
        }
    }
}

impl fmt::Display for ModeCutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeCutoff::Auto => f.write_str("auto"),
            ModeCutoff::All => f.write_str("all"),
            ModeCutoff::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for ModeCutoff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(ModeCutoff::Auto),
            "all" => Ok(ModeCutoff::All),
            _ => match s.parse::<usize>() {
                Ok(m) if m >= 1 => Ok(ModeCutoff::Fixed(m)),
                _ => Err(format!("expected 'auto', 'all' or a positive mode number, got '{s}'")),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseSpec,
    pub scheme: SchemeKind,
    pub output_every: usize,
    /// `-` writes to standard output.
    pub output_path: String,
    pub advection: AdvectionMethod,
    pub boundary: Boundary,
    pub rotation: RotationMethod,
    pub max_mode: ModeCutoff,
}

impl RunConfig {
    pub fn defaults(case: CaseName) -> Self {
        RunConfig {
            case: CaseSpec::defaults(case),
            scheme: SchemeKind::Strang,
            output_every: 1,
            output_path: "-".into(),
            advection: AdvectionMethod::FiniteVolume3,
            boundary: Boundary::ZeroFlux,
            rotation: RotationMethod::ThreeShear,
            max_mode: ModeCutoff::Auto,
        }
    }

    /// Grid with the resolved mode cutoff applied.
    pub fn grid(&self) -> Result<PhaseSpaceGrid, vlasov_core::SimError> {
        let grid = self.case.grid()?;
        let m = self.max_mode.resolve(&grid, self.scheme, self.case.dt);
        Ok(grid.with_max_mode(m))
    }

    /// Effective configuration in the input format; parsing it back gives an
    /// equal `RunConfig`.
    pub fn dump(&self) -> String {
        let c = &self.case;
        let p = &c.params;
        let mut s = String::new();
        let mut line = |k: &str, v: &dyn fmt::Display| {
            writeln!(s, "{k} = {v}").unwrap();
        };
        line("case", &c.name);
        line("scheme", &self.scheme);
        line("nx", &c.nx);
        line("nv1", &c.nv1);
        line("nv2", &c.nv2);
        line("v1max", &c.v1max);
        line("v2max", &c.v2max);
        line("dt", &c.dt);
        line("t_final", &c.t_final);
        line("alpha", &p.alpha);
        line("k", &p.k);
        line("v_th", &p.v_th);
        line("t_r", &p.t_r);
        line("beta", &p.beta);
        line("beam_speed", &p.beam_speed);
        line("output_every", &self.output_every);
        line("output_path", &self.output_path);
        line("advection", &advection_name(self.advection));
        line("velocity_boundary", &boundary_name(self.boundary));
        line("rotation", &rotation_name(self.rotation));
        line("max_mode", &self.max_mode);
        s
    }
}

fn advection_name(m: AdvectionMethod) -> &'static str {
    match m {
        AdvectionMethod::FiniteVolume3 => "fv3",
        AdvectionMethod::SplineSemiLagrangian => "spline",
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::ZeroFlux => "zero-flux",
        Boundary::ZeroInflow => "zero-inflow",
    }
}

fn rotation_name(m: RotationMethod) -> &'static str {
    match m {
        RotationMethod::ThreeShear => "shears",
        RotationMethod::StrangSplit => "strang-sub",
    }
}

/// Every problem found while building a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.problems.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// One `key = value` assignment and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub origin: String,
    pub key: String,
    pub value: String,
}

/// Splits config text into entries; malformed lines are reported by number.
pub fn parse_entries(source: &str, text: &str) -> (Vec<Entry>, Vec<String>) {
    let mut entries = Vec::new();
    let mut problems = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = format!("{source}:{}", n + 1);
        match split_assignment(line) {
            Some((key, value)) => entries.push(Entry { origin, key, value }),
            None => problems.push(format!("{origin}: expected 'key = value', got '{line}'")),
        }
    }
    (entries, problems)
}

/// Parses a `key=value` override given on the command line.
pub fn parse_override(index: usize, text: &str) -> Result<Entry, String> {
    let origin = format!("--set #{}", index + 1);
    split_assignment(text.trim())
        .map(|(key, value)| Entry { origin: origin.clone(), key, value })
        .ok_or_else(|| format!("{origin}: expected 'key=value', got '{text}'"))
}

fn split_assignment(line: &str) -> Option<(String, String)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

/// Parses a config file on top of the defaults of the case it names
/// (strong Landau damping if it names none).
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let (entries, problems) = parse_entries("config", text);
    build(entries, problems)
}

/// Resolves the layered entries into a validated configuration. Later
/// entries win; the case is resolved first so its defaults sit underneath
/// everything else.
pub fn build(entries: Vec<Entry>, mut problems: Vec<String>) -> Result<RunConfig, ConfigError> {
    let mut case = CaseName::LandauStrong;
    for e in entries.iter().filter(|e| e.key == "case") {
        match e.value.parse::<CaseName>() {
            Ok(c) => case = c,
            Err(err) => problems.push(format!("{}: {err}", e.origin)),
        }
    }
    let mut cfg = RunConfig::defaults(case);
    for e in entries.iter().filter(|e| e.key != "case") {
        if let Err(msg) = apply(&mut cfg, &e.key, &e.value) {
            problems.push(format!("{}: {msg}", e.origin));
        }
    }
    // Entries that failed to apply left their defaults in place, so the
    // remaining values can still be checked.
    problems.extend(validate(&cfg));
    if problems.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError { problems })
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse::<T>().map_err(|_| format!("cannot parse '{value}' for {key}"))
}

fn apply(cfg: &mut RunConfig, key: &str, value: &str) -> Result<(), String> {
    let c = &mut cfg.case;
    let p = &mut c.params;
    match key {
        "scheme" => cfg.scheme = value.parse().map_err(|e| format!("{e}"))?,
        "nx" => c.nx = num(key, value)?,
        "nv1" => c.nv1 = num(key, value)?,
        "nv2" => c.nv2 = num(key, value)?,
        "v1max" => c.v1max = num(key, value)?,
        "v2max" => c.v2max = num(key, value)?,
        "dt" => c.dt = num(key, value)?,
        "t_final" => c.t_final = num(key, value)?,
        "alpha" => p.alpha = num(key, value)?,
        "k" => p.k = num(key, value)?,
        "v_th" => p.v_th = num(key, value)?,
        "t_r" => p.t_r = num(key, value)?,
        "beta" => p.beta = num(key, value)?,
        "beam_speed" => p.beam_speed = num(key, value)?,
        "output_every" => cfg.output_every = num(key, value)?,
        "output_path" => cfg.output_path = value.to_string(),
        "advection" => {
            cfg.advection = match value {
                "fv3" => AdvectionMethod::FiniteVolume3,
                "spline" => AdvectionMethod::SplineSemiLagrangian,
                _ => return Err(format!("advection must be 'fv3' or 'spline', got '{value}'")),
            }
        }
        "velocity_boundary" => {
            cfg.boundary = match value {
                "zero-flux" => Boundary::ZeroFlux,
                "zero-inflow" => Boundary::ZeroInflow,
                _ => return Err(format!("velocity_boundary must be 'zero-flux' or 'zero-inflow', got '{value}'")),
            }
        }
        "rotation" => {
            cfg.rotation = match value {
                "shears" => RotationMethod::ThreeShear,
                "strang-sub" => RotationMethod::StrangSplit,
                _ => return Err(format!("rotation must be 'shears' or 'strang-sub', got '{value}'")),
            }
        }
        "max_mode" => cfg.max_mode = value.parse()?,
        _ => return Err(format!("unknown key '{key}'")),
    }
    Ok(())
}

fn validate(cfg: &RunConfig) -> Vec<String> {
    let mut problems = Vec::new();
    if let Err(e) = cfg.case.validate() {
        problems.push(e.to_string());
    }
    if let Err(e) = cfg.case.grid() {
        problems.push(e.to_string());
    }
    if cfg.output_every == 0 {
        problems.push("output_every must be at least 1".into());
    }
    if !(cfg.case.v1max > 0.0 && cfg.case.v2max > 0.0) {
        problems.push("velocity box half-widths must be positive".into());
    }
    problems
}
