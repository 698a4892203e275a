//! `filmorbit` command line: config ingestion, scenario runs and CSV output.

mod config;
mod output;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::bearing::{OperatingPoint, ShaftState};
use crate::dynamics::{find_equilibrium, simulate, BearingSystem, LoadSpec, Termination};
use crate::error::{FilmError, FilmResult};
use crate::forces::DynamicCoefficients;
use crate::oracles::{pipeline_coefficients, report_csv, validation_suite, OracleReport, SuiteInputs};
use crate::reynolds::{solve_film, Grid};

pub use config::{load_config, parse_config, ConfigError, PressureState, RunConfig, Scenario, SweepAxis, SweepSpec};
pub use output::{
    coefficient_csv, coefficient_row, num, pressure_csv, sweep_csv, trajectory_csv, SweepRow,
    COEFFICIENT_HEADER, PRESSURE_HEADER, SWEEP_HEADER, TRAJECTORY_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_CONTACT: i32 = 4;
pub const EXIT_VALIDATION: i32 = 5;

/// Environment variable capping the sweep worker pool.
pub const THREADS_ENV: &str = "FILMORBIT_THREADS";

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Film(FilmError),
    Io(std::io::Error),
    Contact { t: f64, state: ShaftState },
    SweepFailures(Vec<(f64, FilmError)>),
    ValidationFailures(usize),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Film(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Contact { t, state } => write!(
                f,
                "contact at t = {t:e} s: shaft at ({:e}, {:e}) m reached the clearance circle",
                state.x, state.y
            ),
            CliError::SweepFailures(v) => {
                write!(f, "{} sweep point(s) failed:", v.len())?;
                for (x, e) in v {
                    write!(f, "\n  {x}: {e}")?;
                }
                Ok(())
            }
            CliError::ValidationFailures(n) => write!(f, "{n} oracle check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<FilmError> for CliError {
    fn from(e: FilmError) -> Self {
        CliError::Film(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Contact { .. } => EXIT_CONTACT,
            CliError::SweepFailures(_) => EXIT_NO_CONVERGENCE,
            CliError::ValidationFailures(_) => EXIT_VALIDATION,
            CliError::Film(e) => match e.root() {
                FilmError::NoConvergence { .. }
                | FilmError::InconsistentMask { .. }
                | FilmError::OutOfRange { .. } => EXIT_NO_CONVERGENCE,
                FilmError::InvalidState { .. } => EXIT_CONTACT,
                _ => EXIT_CONFIG,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "filmorbit", version, about = "Journal orbit, equilibrium and coefficient runs for a hydrodynamic bearing")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out_dir` in the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Sweep axis: load or speed.
    #[arg(long = "sweep-axis", global = true)]
    pub sweep_axis: Option<String>,
    /// Comma-separated sweep values (N or rev/min).
    #[arg(long, global = true, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    /// Horizontal load ripple amplitude as a fraction of W.
    #[arg(long, global = true)]
    pub ripple: Option<f64>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Integrate the shaft orbit.
    Orbit,
    /// Static equilibrium and its coefficients.
    Equilibrium,
    /// Equilibria over a load or speed axis.
    Sweep,
    /// Pressure and perturbation fields at one state.
    Pressure,
    /// Oracle checks of the coefficient pipeline.
    Validate,
}

impl From<Scenario> for Command {
    fn from(s: Scenario) -> Self {
        match s {
            Scenario::Orbit => Command::Orbit,
            Scenario::Equilibrium => Command::Equilibrium,
            Scenario::Sweep => Command::Sweep,
            Scenario::Pressure => Command::Pressure,
            Scenario::Validate => Command::Validate,
        }
    }
}

fn system(cfg: &RunConfig) -> BearingSystem {
    BearingSystem {
        geom: cfg.geom,
        lubricant: cfg.lubricant,
        rotor: cfg.rotor,
        operating: cfg.operating,
    }
}

fn grid(cfg: &RunConfig) -> FilmResult<Grid> {
    cfg.simulation.grid.build(cfg.geom.length)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn coefficients_at(cfg: &RunConfig, op: &OperatingPoint, state: &ShaftState, grid: &Grid) -> FilmResult<DynamicCoefficients> {
    let sol = solve_film(&cfg.geom, &cfg.lubricant, op, state, grid, &cfg.simulation.solver, None)?;
    DynamicCoefficients::from_solution(&sol, grid, &cfg.geom)
}

/// Metadata written next to the trajectory for plotting.
#[derive(Debug, Serialize)]
pub struct OrbitMeta {
    pub clearance_m: f64,
    pub equilibrium_x_m: Option<f64>,
    pub equilibrium_y_m: Option<f64>,
    pub termination: &'static str,
    pub steps: usize,
    pub final_t_s: f64,
    /// Distance from the constant-load equilibrium over the second half of the run.
    pub late_min_distance_m: Option<f64>,
    pub late_max_distance_m: Option<f64>,
}

pub struct OrbitOutcome {
    pub termination: Termination,
    pub final_state: ShaftState,
    pub meta: OrbitMeta,
    pub summary: String,
}

pub fn cmd_orbit(cfg: &RunConfig, out: &Path) -> CliResult<OrbitOutcome> {
    let sys = system(cfg);
    let g = grid(cfg)?;
    let traj = simulate(cfg.initial, &cfg.load, &sys, &cfg.simulation)?;
    let steady = LoadSpec { ripple: 0.0, ..cfg.load };
    let eq = find_equilibrium(&steady, &cfg.operating, &cfg.geom, &cfg.lubricant, &g, &cfg.simulation.solver).ok();

    let last = *traj.last();
    let (late_min, late_max) = match eq {
        Some(eq) => {
            let half = 0.5 * last.t;
            let d: Vec<f64> = traj
                .samples
                .iter()
                .filter(|s| s.t >= half)
                .map(|s| (s.state.x - eq.x).hypot(s.state.y - eq.y))
                .collect();
            (
                d.iter().copied().reduce(f64::min),
                d.iter().copied().reduce(f64::max),
            )
        }
        None => (None, None),
    };
    let meta = OrbitMeta {
        clearance_m: cfg.geom.clearance,
        equilibrium_x_m: eq.map(|s| s.x),
        equilibrium_y_m: eq.map(|s| s.y),
        termination: traj.termination.as_str(),
        steps: traj.steps,
        final_t_s: last.t,
        late_min_distance_m: late_min,
        late_max_distance_m: late_max,
    };

    write_file(out, "trajectory.csv", &trajectory_csv(&traj, &cfg.geom))?;
    let row = coefficient_row(cfg.load.magnitude, &cfg.operating, &last.state, &cfg.geom, &traj.final_coefficients);
    write_file(out, "coefficients.csv", &coefficient_csv(&[row]))?;
    let meta_json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write_file(out, "orbit_meta.json", &(meta_json + "\n"))?;

    let mut summary = format!(
        "termination: {}\nsteps: {}\nfinal time: {} s\nfinal position: ({}, {}) m\nfinal film force: ({}, {}) N\n",
        traj.termination.as_str(),
        traj.steps,
        last.t,
        last.state.x,
        last.state.y,
        last.film_force.x,
        last.film_force.y
    );
    if let (Some(lo), Some(hi)) = (late_min, late_max) {
        summary.push_str(&format!(
            "distance from equilibrium over second half: {lo:e} .. {hi:e} m (c = {:e} m)\n",
            cfg.geom.clearance
        ));
    }
    Ok(OrbitOutcome {
        termination: traj.termination,
        final_state: last.state,
        meta,
        summary,
    })
}

pub fn cmd_equilibrium(cfg: &RunConfig, out: &Path) -> CliResult<(ShaftState, DynamicCoefficients)> {
    let g = grid(cfg)?;
    let eq = find_equilibrium(&cfg.load, &cfg.operating, &cfg.geom, &cfg.lubricant, &g, &cfg.simulation.solver)?;
    let c = coefficients_at(cfg, &cfg.operating, &eq, &g)?;
    let row = coefficient_row(cfg.load.magnitude, &cfg.operating, &eq, &cfg.geom, &c);
    write_file(out, "equilibrium.csv", &coefficient_csv(&[row]))?;
    Ok((eq, c))
}

/// Worker cap from the value of [`THREADS_ENV`]; `None` leaves the choice to rayon.
pub fn thread_cap(var: Option<&str>) -> Result<Option<usize>, ConfigError> {
    let Some(v) = var else {
        return Ok(None);
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(Some(n)),
        _ => Err(ConfigError::Invalid {
            field: THREADS_ENV.to_string(),
            reason: format!("expected a positive integer, got {v:?}"),
        }),
    }
}

fn worker_pool() -> CliResult<rayon::ThreadPool> {
    let var = std::env::var(THREADS_ENV).ok();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap(var.as_deref())? {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Io(std::io::Error::other(e)))
}

fn sweep_point(cfg: &RunConfig, sweep: &SweepSpec, value: f64, g: &Grid) -> FilmResult<SweepRow> {
    let (load, op) = match sweep.axis {
        SweepAxis::Load => (LoadSpec { magnitude: value, ripple: 0.0, ..cfg.load }, cfg.operating),
        SweepAxis::Speed => (LoadSpec { ripple: 0.0, ..cfg.load }, OperatingPoint::from_rpm(value)?),
    };
    load.validate()?;
    let eq = find_equilibrium(&load, &op, &cfg.geom, &cfg.lubricant, g, &cfg.simulation.solver)?;
    let c = coefficients_at(cfg, &op, &eq, g)?;
    Ok(SweepRow {
        axis_value: value,
        state: eq,
        coefficients: c,
    })
}

/// Rows are in the order of `sweep.values`; failed points are left out of the
/// CSV and reported in the error.
pub fn cmd_sweep(cfg: &RunConfig, sweep: &SweepSpec, out: &Path) -> CliResult<Vec<SweepRow>> {
    let g = grid(cfg)?;
    let pool = worker_pool()?;
    let results: Vec<FilmResult<SweepRow>> =
        pool.install(|| sweep.values.par_iter().map(|&v| sweep_point(cfg, sweep, v, &g)).collect());
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (v, r) in sweep.values.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((*v, e)),
        }
    }
    write_file(out, "sweep.csv", &sweep_csv(&rows, &cfg.geom))?;
    if failures.is_empty() {
        Ok(rows)
    } else {
        Err(CliError::SweepFailures(failures))
    }
}

pub fn cmd_pressure(cfg: &RunConfig, out: &Path) -> CliResult<ShaftState> {
    let g = grid(cfg)?;
    let state = match cfg.pressure {
        Some(p) => ShaftState::from_polar(p.eps * cfg.geom.clearance, p.theta_att),
        None => find_equilibrium(&cfg.load, &cfg.operating, &cfg.geom, &cfg.lubricant, &g, &cfg.simulation.solver)?,
    };
    let sol = solve_film(&cfg.geom, &cfg.lubricant, &cfg.operating, &state, &g, &cfg.simulation.solver, None)?;
    write_file(out, "pressure.csv", &pressure_csv(&sol, &g))?;
    Ok(state)
}

pub fn suite_inputs(cfg: &RunConfig) -> FilmResult<SuiteInputs> {
    Ok(SuiteInputs {
        geom: cfg.geom,
        lubricant: cfg.lubricant,
        operating: cfg.operating,
        grid: grid(cfg)?,
        settings: cfg.simulation.solver,
    })
}

/// Runs the oracle suite against `pipeline`; writes the report before
/// reporting failures.
pub fn cmd_validate_with(
    cfg: &RunConfig,
    out: &Path,
    pipeline: &dyn Fn(&ShaftState) -> FilmResult<DynamicCoefficients>,
) -> CliResult<Vec<OracleReport>> {
    let inputs = suite_inputs(cfg)?;
    let reports = validation_suite(&inputs, pipeline)?;
    write_file(out, "oracle_report.csv", &report_csv(&reports))?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::ValidationFailures(failed));
    }
    Ok(reports)
}

pub fn cmd_validate(cfg: &RunConfig, out: &Path) -> CliResult<Vec<OracleReport>> {
    let inputs = suite_inputs(cfg)?;
    cmd_validate_with(cfg, out, &|s| pipeline_coefficients(&inputs, s))
}

fn apply_overrides(cli: &Cli, cfg: &mut RunConfig) -> CliResult<()> {
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(r) = cli.ripple {
        let load = LoadSpec { ripple: r, ..cfg.load };
        load.validate().map_err(|e| {
            CliError::Config(ConfigError::Invalid {
                field: "--ripple".into(),
                reason: e.to_string(),
            })
        })?;
        cfg.load = load;
    }
    if cli.sweep_axis.is_some() || cli.values.is_some() {
        let axis = match &cli.sweep_axis {
            Some(a) => SweepAxis::parse(a).ok_or_else(|| {
                CliError::Config(ConfigError::Invalid {
                    field: "--sweep-axis".into(),
                    reason: format!("expected `load` or `speed`, got `{a}`"),
                })
            })?,
            None => cfg.sweep.as_ref().map(|s| s.axis).ok_or_else(|| {
                CliError::Config(ConfigError::Invalid {
                    field: "--sweep-axis".into(),
                    reason: "required when the config has no sweep section".into(),
                })
            })?,
        };
        let values = match &cli.values {
            Some(v) => v.clone(),
            None => cfg.sweep.as_ref().map(|s| s.values.clone()).ok_or_else(|| {
                CliError::Config(ConfigError::Invalid {
                    field: "--values".into(),
                    reason: "required when the config has no sweep section".into(),
                })
            })?,
        };
        cfg.sweep = Some(SweepSpec::new(axis, values)?);
    }
    Ok(())
}

/// Parses arguments, runs the command and writes a summary to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    let path = cli.config.as_ref().ok_or_else(|| {
        CliError::Config(ConfigError::Invalid {
            field: "--config".into(),
            reason: "a config file is required".into(),
        })
    })?;
    let mut cfg = load_config(path)?;
    apply_overrides(cli, &mut cfg)?;
    let command = cli.command.or(cfg.scenario.map(Command::from)).ok_or_else(|| {
        CliError::Config(ConfigError::Invalid {
            field: "scenario".into(),
            reason: "no subcommand given and the config selects no scenario".into(),
        })
    })?;
    let out = cfg.out_dir.clone();
    match command {
        Command::Orbit => {
            let o = cmd_orbit(&cfg, &out)?;
            write!(stdout, "{}", o.summary)?;
            if o.termination == Termination::Contact {
                return Err(CliError::Contact {
                    t: o.meta.final_t_s,
                    state: o.final_state,
                });
            }
        }
        Command::Equilibrium => {
            let (eq, c) = cmd_equilibrium(&cfg, &out)?;
            writeln!(
                stdout,
                "equilibrium: ({}, {}) m, eps = {}\nfilm force: ({}, {}) N",
                eq.x,
                eq.y,
                eq.eccentricity_ratio(&cfg.geom),
                c.f0.x,
                c.f0.y
            )?;
        }
        Command::Sweep => {
            let sweep = cfg.sweep.clone().ok_or_else(|| {
                CliError::Config(ConfigError::Invalid {
                    field: "sweep".into(),
                    reason: "give a sweep section or --sweep-axis and --values".into(),
                })
            })?;
            let rows = cmd_sweep(&cfg, &sweep, &out)?;
            writeln!(stdout, "{} sweep point(s) written", rows.len())?;
        }
        Command::Pressure => {
            let st = cmd_pressure(&cfg, &out)?;
            writeln!(stdout, "pressure field at ({}, {}) m written", st.x, st.y)?;
        }
        Command::Validate => {
            let reports = cmd_validate(&cfg, &out)?;
            writeln!(stdout, "{} oracle check(s) passed", reports.len())?;
        }
    }
    Ok(())
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
