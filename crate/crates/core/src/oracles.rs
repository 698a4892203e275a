//! Independent checks of the film pipeline.
//!
//! The difference oracles rebuild `k` and `b` from the nonlinear film force
//! alone (static and squeeze solves followed by quadrature), never touching
//! the perturbation equations. The short-bearing oracle is the classical
//! closed form for a slender bearing with a half (π) film.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::Matrix2;

use crate::bearing::{BearingGeometry, Lubricant, OperatingPoint, ShaftState};
use crate::error::{FilmError, FilmResult};
use crate::forces::{integrate_force, DynamicCoefficients, ForceVector};
use crate::reynolds::{solve_static, solve_transient, Grid, SolverSettings};

/// Position step for [`fd_stiffness`] as a fraction of the clearance.
pub const POSITION_STEP_FRACTION: f64 = 1e-3;

/// Velocity step for [`fd_damping`] [m/s].
///
/// Small enough that the cavitation boundary does not move between the two
/// squeeze solves; at 1e-4 m/s the boundary shifts by a node on 72×17 and
/// coarser grids and the off-diagonal entries pick up several percent of
/// kink error.
pub const VELOCITY_STEP: f64 = 1e-6;

/// Largest `L/(2r)` for which the short-bearing form is accepted.
pub const SHORT_BEARING_MAX_ASPECT: f64 = 0.25;

/// Largest eccentricity ratio for which the short-bearing form is accepted.
pub const SHORT_BEARING_MAX_ECCENTRICITY: f64 = 0.9;

fn film_force(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<ForceVector> {
    let (p, _) = solve_transient(geom, lub, op, state, grid, settings)?;
    integrate_force(&p, grid, geom)
}

/// Central-difference stiffness `∂F/∂(x, y)` of the static film force.
pub fn fd_stiffness(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    delta: f64,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<Matrix2<f64>> {
    if !(delta > 0.0) {
        return Err(FilmError::param("delta", "must be positive"));
    }
    let base = state.position_only();
    let static_force = |s: ShaftState| -> FilmResult<ForceVector> {
        let (p, _) = solve_static(geom, lub, op, &s, grid, settings)?;
        integrate_force(&p, grid, geom)
    };
    let cx = (static_force(ShaftState { x: base.x + delta, ..base })?
        - static_force(ShaftState { x: base.x - delta, ..base })?)
        / (2.0 * delta);
    let cy = (static_force(ShaftState { y: base.y + delta, ..base })?
        - static_force(ShaftState { y: base.y - delta, ..base })?)
        / (2.0 * delta);
    Ok(Matrix2::from_columns(&[cx, cy]))
}

/// Central-difference damping `∂F/∂(ẋ, ẏ)` about zero velocity.
pub fn fd_damping(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    vdelta: f64,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<Matrix2<f64>> {
    if !(vdelta > 0.0) {
        return Err(FilmError::param("vdelta", "must be positive"));
    }
    let base = state.position_only();
    let force = |vx: f64, vy: f64| film_force(geom, lub, op, &base.with_velocity(vx, vy), grid, settings);
    let cx = (force(vdelta, 0.0)? - force(-vdelta, 0.0)?) / (2.0 * vdelta);
    let cy = (force(0.0, vdelta)? - force(0.0, -vdelta)?) / (2.0 * vdelta);
    Ok(Matrix2::from_columns(&[cx, cy]))
}

/// Short-bearing film load, split along and across the line of centers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortBearingLoad {
    /// Component along the line of centers [N].
    pub radial: f64,
    /// Component perpendicular to it [N].
    pub tangential: f64,
    /// Angle between the load line and the line of centers [rad].
    pub attitude: f64,
}

impl ShortBearingLoad {
    pub fn magnitude(&self) -> f64 {
        self.radial.hypot(self.tangential)
    }
}

/// Ocvirk short-bearing load with the negative half of the film discarded.
pub fn short_bearing_forces(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    eps: f64,
) -> FilmResult<ShortBearingLoad> {
    let aspect = geom.length / (2.0 * geom.radius);
    if aspect > SHORT_BEARING_MAX_ASPECT {
        return Err(FilmError::Domain(format!(
            "L/D = {aspect:.4} exceeds {SHORT_BEARING_MAX_ASPECT}"
        )));
    }
    if !(eps > 0.0 && eps < SHORT_BEARING_MAX_ECCENTRICITY) {
        return Err(FilmError::Domain(format!(
            "eccentricity ratio {eps} outside (0, {SHORT_BEARING_MAX_ECCENTRICITY})"
        )));
    }
    let u = op.omega * geom.radius;
    let scale = lub.viscosity * u * geom.length.powi(3) / (geom.clearance * geom.clearance);
    let q = 1.0 - eps * eps;
    let radial = scale * eps * eps / (q * q);
    let tangential = scale * PI * eps / (4.0 * q.powf(1.5));
    Ok(ShortBearingLoad {
        radial,
        tangential,
        attitude: tangential.atan2(radial),
    })
}

/// One oracle comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub oracle: f64,
    pub pipeline: f64,
    /// `|pipeline − oracle| / max(|oracle|, floor)`.
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn compare(quantity: impl Into<String>, oracle: f64, pipeline: f64, tol: f64, floor: f64) -> Self {
        let denom = oracle.abs().max(floor);
        let diff = (pipeline - oracle).abs();
        let rel_err = if denom > 0.0 {
            diff / denom
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            quantity: quantity.into(),
            oracle,
            pipeline,
            rel_err,
            tol,
            pass: rel_err <= tol,
        }
    }
}

pub const REPORT_HEADER: &str = "quantity,oracle,pipeline,rel_err,tol,pass";

pub fn report_csv(reports: &[OracleReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.quantity, r.oracle, r.pipeline, r.rel_err, r.tol, r.pass
        );
    }
    out
}

/// Inputs shared by every check of [`validation_suite`].
#[derive(Clone, Copy, Debug)]
pub struct SuiteInputs {
    pub geom: BearingGeometry,
    pub lubricant: Lubricant,
    pub operating: OperatingPoint,
    pub grid: Grid,
    pub settings: SolverSettings,
}

/// Eccentricity ratios at which coefficients are checked.
pub const COEFFICIENT_ECCENTRICITIES: [f64; 3] = [0.2, 0.3, 0.5];

/// Attitude of the shaft at the coefficient check states; the shaft sits
/// on the +x side, close to where a vertical load puts it.
pub const CHECK_ATTITUDE: f64 = PI / 2.0;

pub const SHORT_BEARING_ECCENTRICITIES: [f64; 3] = [0.2, 0.4, 0.6];

pub const COEFFICIENT_TOL: f64 = 0.02;
pub const STIFFNESS_FLOOR: f64 = 1e3;
pub const DAMPING_FLOOR: f64 = 1e1;
pub const SHORT_BEARING_TOL: f64 = 0.10;

const ENTRY_NAMES: [&str; 4] = ["xx", "xy", "yx", "yy"];

fn entries(m: &Matrix2<f64>) -> [f64; 4] {
    [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
}

/// Every oracle check, with the coefficients under test supplied by
/// `pipeline` so that faults can be injected.
pub fn validation_suite(
    inputs: &SuiteInputs,
    pipeline: &dyn Fn(&ShaftState) -> FilmResult<DynamicCoefficients>,
) -> FilmResult<Vec<OracleReport>> {
    let SuiteInputs {
        geom,
        lubricant: lub,
        operating: op,
        grid,
        settings,
    } = *inputs;
    let mut out = Vec::new();

    let (p0, active) = solve_static(&geom, &lub, &op, &ShaftState::default(), &grid, &settings)?;
    out.push(OracleReport::compare("null_p0_max_abs", 0.0, p0.max_abs(), 0.0, 1.0));
    out.push(OracleReport::compare("null_active_nodes", 0.0, active.count() as f64, 0.0, 1.0));
    let f = integrate_force(&p0, &grid, &geom)?;
    out.push(OracleReport::compare("null_fx", 0.0, f.x, 0.0, 1.0));
    out.push(OracleReport::compare("null_fy", 0.0, f.y, 0.0, 1.0));

    for eps in COEFFICIENT_ECCENTRICITIES {
        let state = ShaftState::from_polar(eps * geom.clearance, CHECK_ATTITUDE);
        let coeffs = pipeline(&state)?;
        let k = fd_stiffness(&geom, &lub, &op, &state, POSITION_STEP_FRACTION * geom.clearance, &grid, &settings)?;
        let b = fd_damping(&geom, &lub, &op, &state, VELOCITY_STEP, &grid, &settings)?;
        for (n, (o, p)) in entries(&k).iter().zip(entries(&coeffs.k)).enumerate() {
            out.push(OracleReport::compare(
                format!("eps{eps}_k{}", ENTRY_NAMES[n]),
                *o,
                p,
                COEFFICIENT_TOL,
                STIFFNESS_FLOOR,
            ));
        }
        for (n, (o, p)) in entries(&b).iter().zip(entries(&coeffs.b)).enumerate() {
            out.push(OracleReport::compare(
                format!("eps{eps}_b{}", ENTRY_NAMES[n]),
                *o,
                p,
                COEFFICIENT_TOL,
                DAMPING_FLOOR,
            ));
        }
        let (bxy, byx) = (coeffs.b[(0, 1)], coeffs.b[(1, 0)]);
        out.push(OracleReport::compare(
            format!("eps{eps}_b_symmetry"),
            bxy,
            byx,
            COEFFICIENT_TOL,
            bxy.abs().max(byx.abs()),
        ));
    }

    let slender = BearingGeometry::new(geom.radius, 0.25 * geom.radius, geom.clearance)?;
    let slender_grid = Grid::new(grid.n_theta(), grid.n_z(), slender.length)?;
    for eps in SHORT_BEARING_ECCENTRICITIES {
        let closed = short_bearing_forces(&slender, &lub, &op, eps)?;
        let state = ShaftState::from_polar(eps * slender.clearance, CHECK_ATTITUDE);
        let (p, _) = solve_static(&slender, &lub, &op, &state, &slender_grid, &settings)?;
        let f = integrate_force(&p, &slender_grid, &slender)?;
        out.push(OracleReport::compare(
            format!("short_bearing_eps{eps}_force"),
            closed.magnitude(),
            f.norm(),
            SHORT_BEARING_TOL,
            0.0,
        ));
    }
    Ok(out)
}

/// The coefficients the library itself produces, for [`validation_suite`].
pub fn pipeline_coefficients(inputs: &SuiteInputs, state: &ShaftState) -> FilmResult<DynamicCoefficients> {
    let sol = crate::reynolds::solve_film(
        &inputs.geom,
        &inputs.lubricant,
        &inputs.operating,
        state,
        &inputs.grid,
        &inputs.settings,
        None,
    )?;
    DynamicCoefficients::from_solution(&sol, &inputs.grid, &inputs.geom)
}
