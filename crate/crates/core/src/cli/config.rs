//! JSON run configuration. Every key carries its unit; unknown keys are errors.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bearing::{BearingGeometry, Lubricant, OperatingPoint, RotorProperties, ShaftState};
use crate::dynamics::{LoadSpec, SimulationConfig};
use crate::reynolds::{CavitationScheme, GridSpec, SolverSettings};

#[derive(Debug)]
pub enum ConfigError {
    Io { path: PathBuf, source: std::io::Error },
    Parse { line: usize, column: usize, message: String },
    Invalid { field: String, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            ConfigError::Parse { line, column, message } => {
                write!(f, "config parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Invalid { field, reason } => write!(f, "invalid config field `{field}`: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// Scenario run when no subcommand is given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Orbit,
    Equilibrium,
    Sweep,
    Pressure,
    Validate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Load,
    Speed,
}

impl SweepAxis {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "load" => Some(SweepAxis::Load),
            "speed" => Some(SweepAxis::Speed),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Loads in N or speeds in rev/min.
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, values: Vec<f64>) -> Result<Self, ConfigError> {
        if values.len() < 2 {
            return Err(invalid("sweep.values", "a sweep needs at least two values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sweep.values", "values must be finite"));
        }
        let up = values.windows(2).all(|w| w[1] > w[0]);
        let down = values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(invalid("sweep.values", "values must be strictly monotone"));
        }
        Ok(Self { axis, values })
    }
}

/// Shaft state for the pressure dump, given directly in polar form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureState {
    pub eps: f64,
    pub theta_att: f64,
}

/// Validated configuration in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub geom: BearingGeometry,
    pub lubricant: Lubricant,
    pub rotor: RotorProperties,
    pub operating: OperatingPoint,
    pub load: LoadSpec,
    pub initial: ShaftState,
    pub simulation: SimulationConfig,
    pub sweep: Option<SweepSpec>,
    pub pressure: Option<PressureState>,
    pub out_dir: PathBuf,
    pub scenario: Option<Scenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    bearing: RawBearing,
    #[serde(default)]
    rotor: RawRotor,
    operating: RawOperating,
    #[serde(default)]
    load: RawLoad,
    #[serde(default)]
    initial: RawInitial,
    #[serde(default)]
    simulation: RawSimulation,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    solver: RawSolver,
    sweep: Option<RawSweep>,
    pressure: Option<RawPressure>,
    out_dir: Option<PathBuf>,
    scenario: Option<Scenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBearing {
    r_m: f64,
    #[serde(rename = "L_m")]
    l_m: f64,
    c_m: f64,
    #[serde(rename = "mu_Pa_s")]
    mu_pa_s: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRotor {
    mass_kg: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperating {
    omega_rpm: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawLoad {
    #[serde(rename = "W_N", default)]
    w_n: f64,
    #[serde(default)]
    phi_rad: f64,
    #[serde(default)]
    ripple_percent: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(default)]
    x_m: f64,
    #[serde(default)]
    y_m: f64,
    #[serde(default)]
    vx_mps: f64,
    #[serde(default)]
    vy_mps: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSimulation {
    dt_s: Option<f64>,
    t_end_s: Option<f64>,
    #[serde(rename = "settle_tol_force_N")]
    settle_tol_force_n: Option<f64>,
    settle_tol_velocity_mps: Option<f64>,
    refresh_interval: Option<usize>,
    save_every: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n_theta: Option<usize>,
    n_z: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    relaxation: Option<f64>,
    tol: Option<f64>,
    max_iters: Option<usize>,
    scheme: Option<RawScheme>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
enum RawScheme {
    ActiveSet,
    ProjectedSor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: SweepAxis,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPressure {
    eps: f64,
    theta_att_rad: f64,
}

fn field<T>(name: &str, r: crate::error::FilmResult<T>) -> Result<T, ConfigError> {
    r.map_err(|e| invalid(name, e.to_string()))
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let geom = field(
        "bearing",
        BearingGeometry::new(raw.bearing.r_m, raw.bearing.l_m, raw.bearing.c_m),
    )?;
    let lubricant = field("bearing.mu_Pa_s", Lubricant::new(raw.bearing.mu_pa_s))?;
    let mass = raw.rotor.mass_kg.ok_or_else(|| {
        invalid(
            "rotor.mass_kg",
            "the equivalent rotor mass m_a is required and has no default; give it in kg",
        )
    })?;
    let rotor = field("rotor.mass_kg", RotorProperties::new(mass))?;
    let operating = field("operating.omega_rpm", OperatingPoint::from_rpm(raw.operating.omega_rpm))?;

    let load = LoadSpec {
        magnitude: raw.load.w_n,
        angle: raw.load.phi_rad,
        ripple: raw.load.ripple_percent / 100.0,
    };
    field("load", load.validate())?;

    let i = raw.initial;
    let initial = ShaftState {
        x: i.x_m,
        y: i.y_m,
        vx: i.vx_mps,
        vy: i.vy_mps,
    };
    if ![initial.x, initial.y, initial.vx, initial.vy].iter().all(|v| v.is_finite()) {
        return Err(invalid("initial", "components must be finite"));
    }

    let defaults = SimulationConfig::default();
    let grid_defaults = GridSpec::default();
    let solver_defaults = SolverSettings::default();
    let s = raw.simulation;
    let simulation = SimulationConfig {
        dt: s.dt_s.unwrap_or(defaults.dt),
        t_end: s.t_end_s.unwrap_or(defaults.t_end),
        settle_tol_force: s.settle_tol_force_n.or(defaults.settle_tol_force),
        settle_tol_velocity: s.settle_tol_velocity_mps.unwrap_or(defaults.settle_tol_velocity),
        refresh_interval: s.refresh_interval.unwrap_or(defaults.refresh_interval),
        save_every: s.save_every.unwrap_or(defaults.save_every),
        grid: GridSpec {
            n_theta: raw.grid.n_theta.unwrap_or(grid_defaults.n_theta),
            n_z: raw.grid.n_z.unwrap_or(grid_defaults.n_z),
        },
        solver: SolverSettings {
            relaxation: raw.solver.relaxation.unwrap_or(solver_defaults.relaxation),
            tol: raw.solver.tol.unwrap_or(solver_defaults.tol),
            max_iters: raw.solver.max_iters.unwrap_or(solver_defaults.max_iters),
            scheme: match raw.solver.scheme {
                None => solver_defaults.scheme,
                Some(RawScheme::ActiveSet) => CavitationScheme::ActiveSet,
                Some(RawScheme::ProjectedSor) => CavitationScheme::ProjectedSor,
            },
        },
    };
    field("simulation", simulation.validate())?;
    field("grid", simulation.grid.build(geom.length))?;

    let sweep = raw.sweep.map(|s| SweepSpec::new(s.axis, s.values)).transpose()?;
    let pressure = match raw.pressure {
        None => None,
        Some(p) => {
            if !(p.eps >= 0.0 && p.eps < 1.0) {
                return Err(invalid("pressure.eps", "must lie in [0, 1)"));
            }
            if !p.theta_att_rad.is_finite() {
                return Err(invalid("pressure.theta_att_rad", "must be finite"));
            }
            Some(PressureState {
                eps: p.eps,
                theta_att: p.theta_att_rad,
            })
        }
    };

    Ok(RunConfig {
        geom,
        lubricant,
        rotor,
        operating,
        load,
        initial,
        simulation,
        sweep,
        pressure,
        out_dir: raw.out_dir.unwrap_or_else(|| PathBuf::from("out")),
        scenario: raw.scenario,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
