//! Finite-difference solution of the incompressible Reynolds equation
//!
//! ```text
//! (1/r²) ∂θ(h³/(12μ) ∂θ p) + ∂z(h³/(12μ) ∂z p) = (ω/2) ∂h/∂θ + ẋ sin θ + ẏ cos θ
//! ```
//!
//! with `p = 0` on both bearing ends, negative pressures clamped to zero
//! (cavitation), and the four first-order perturbation equations for
//! `∂p/∂x`, `∂p/∂y`, `∂p/∂ẋ`, `∂p/∂ẏ` about the static (`ẋ = ẏ = 0`) film.

mod banded;
mod grid;
mod operator;
mod solver;

use crate::bearing::{
    film_thickness_dtheta, film_thickness_unchecked, BearingGeometry, Lubricant, OperatingPoint,
    ShaftState,
};
use crate::error::{FilmError, FilmResult};

pub use grid::{ActiveRegion, Grid, GridSpec, PressureField};
pub use operator::{transient_source, FilmOperator};

use operator::column_source;
use solver::{clamped_solve, linear_solve, masked_residual};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CavitationScheme {
    /// Exact solves on the pressurized set, iterated until the set is a fixed point.
    #[default]
    ActiveSet,
    /// Christopherson projected SOR sweeps.
    ProjectedSor,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// SOR over-relaxation factor, in (0, 2).
    pub relaxation: f64,
    /// Relative residual tolerance.
    pub tol: f64,
    /// Sweep cap (SOR) or active-set iteration cap.
    pub max_iters: usize,
    pub scheme: CavitationScheme,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            relaxation: 1.5,
            tol: 1e-6,
            max_iters: 100_000,
            scheme: CavitationScheme::ActiveSet,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> FilmResult<()> {
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(FilmError::param("relaxation", "must lie in (0, 2)"));
        }
        if !(self.tol > 0.0) {
            return Err(FilmError::param("tol", "must be positive"));
        }
        if self.max_iters < 1 {
            return Err(FilmError::param("max_iters", "must be at least 1"));
        }
        Ok(())
    }
}

/// Operator, right-hand side and node set of one discrete equation.
#[derive(Clone, Debug)]
pub struct DiscreteSystem {
    pub operator: FilmOperator,
    pub source: Vec<f64>,
    pub mask: Vec<bool>,
}

/// Max-norm defect of `field` on the system's node set, divided by the
/// max-norm of the source there.
pub fn residual(field: &PressureField, system: &DiscreteSystem) -> f64 {
    masked_residual(&system.operator, &system.source, &system.mask, field.values())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationFields {
    /// ∂p/∂x [Pa/m]
    pub px: PressureField,
    /// ∂p/∂y [Pa/m]
    pub py: PressureField,
    /// ∂p/∂ẋ [Pa·s/m]
    pub pvx: PressureField,
    /// ∂p/∂ẏ [Pa·s/m]
    pub pvy: PressureField,
}

/// Static pressure, its pressurized region and the four perturbation fields.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureSolution {
    pub p0: PressureField,
    pub active: ActiveRegion,
    pub perturbations: PerturbationFields,
}

fn checked_inputs(
    geom: &BearingGeometry,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<()> {
    state.check_inside(geom)?;
    settings.validate()?;
    if (grid.length() - geom.length).abs() > 1e-12 * geom.length {
        return Err(FilmError::GridShape(format!(
            "grid length {} does not match bearing length {}",
            grid.length(),
            geom.length
        )));
    }
    Ok(())
}

fn clamped_field(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
    hint: Option<&ActiveRegion>,
) -> FilmResult<(PressureField, ActiveRegion, FilmOperator, solver::Clamped)> {
    checked_inputs(geom, state, grid, settings)?;
    let operator = FilmOperator::assemble(geom, lub, state, grid);
    let source = transient_source(state, op.omega, grid);
    let sol = clamped_solve(&operator, &source, settings, hint.map(|h| h.mask.as_slice()))?;
    let field = PressureField::from_values(grid, sol.p.clone())?;
    let active = ActiveRegion::from_mask(grid, sol.mask.clone());
    Ok((field, active, operator, sol))
}

/// Static film pressure (velocity ignored) with cavitation.
pub fn solve_static(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<(PressureField, ActiveRegion)> {
    solve_transient(geom, lub, op, &state.position_only(), grid, settings)
}

/// Film pressure including the squeeze terms of the shaft velocity.
pub fn solve_transient(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<(PressureField, ActiveRegion)> {
    let (field, active, _, _) = clamped_field(geom, lub, op, state, grid, settings, None)?;
    Ok((field, active))
}

/// Right-hand sides of the x, y, ẋ, ẏ perturbation equations on the static
/// pressurized set. `∂p0/∂θ` is a central difference of the converged field.
pub fn perturbation_sources(
    p0: &PressureField,
    active: &ActiveRegion,
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
) -> [Vec<f64>; 4] {
    let n = grid.len();
    let mut out = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let half_omega = 0.5 * op.omega;
    let inv_2dt = 1.0 / (2.0 * grid.d_theta());
    let r2 = geom.radius * geom.radius;
    for i in 0..grid.n_theta() {
        let th = grid.theta(i);
        let (s, c) = th.sin_cos();
        let h = film_thickness_unchecked(th, state, geom.clearance);
        let hp = film_thickness_dtheta(th, state);
        let k = h * h * h / (4.0 * lub.viscosity * r2);
        // d/dθ (sin θ / h), d/dθ (cos θ / h)
        let dsin = (c * h - s * hp) / (h * h);
        let dcos = (-s * h - c * hp) / (h * h);
        let sx = half_omega * (c - 3.0 * s * hp / h);
        let sy = -half_omega * (s + 3.0 * c * hp / h);
        for j in 1..grid.n_z() - 1 {
            let q = grid.idx(i, j);
            if !active.mask[q] {
                continue;
            }
            let dp0 = (p0[(grid.next(i), j)] - p0[(grid.prev(i), j)]) * inv_2dt;
            out[0][q] = sx - k * dsin * dp0;
            out[1][q] = sy - k * dcos * dp0;
            out[2][q] = s;
            out[3][q] = c;
        }
    }
    out
}

/// Perturbation fields about a converged static solution.
///
/// They share the static pressurized set. For the concentric shaft that set
/// is empty and the film force is positively homogeneous in the
/// displacement and velocity; each field is then the cavitating solution for
/// a unit perturbation, which is what a symmetric difference quotient of the
/// nonlinear force returns.
#[allow(clippy::too_many_arguments)]
pub fn solve_perturbations(
    p0: &PressureField,
    active: &ActiveRegion,
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<PerturbationFields> {
    let state = state.position_only();
    checked_inputs(geom, &state, grid, settings)?;
    p0.matches(grid)?;
    let operator = FilmOperator::assemble(geom, lub, &state, grid);
    perturbations_with(&operator, None, p0, active, geom, lub, op, &state, grid, settings)
}

#[allow(clippy::too_many_arguments)]
fn perturbations_with(
    operator: &FilmOperator,
    factor: Option<&solver::WindowFactor>,
    p0: &PressureField,
    active: &ActiveRegion,
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<PerturbationFields> {
    let fields: Vec<Vec<f64>> = if active.is_empty() {
        let e = state.eccentricity();
        if e > 0.0 {
            return Err(FilmError::InconsistentMask { eccentricity: e });
        }
        let w = 0.5 * op.omega;
        let sources = [
            column_source(grid, |t| w * t.cos()),
            column_source(grid, |t| -w * t.sin()),
            column_source(grid, f64::sin),
            column_source(grid, f64::cos),
        ];
        sources
            .iter()
            .map(|s| clamped_solve(operator, s, settings, None).map(|c| c.p))
            .collect::<FilmResult<_>>()?
    } else {
        let sources = perturbation_sources(p0, active, geom, lub, op, state, grid);
        sources
            .iter()
            .map(|s| linear_solve(operator, s, &active.mask, settings, factor))
            .collect::<FilmResult<_>>()?
    };
    let mut it = fields.into_iter().map(|v| PressureField::from_values(grid, v));
    Ok(PerturbationFields {
        px: it.next().unwrap()?,
        py: it.next().unwrap()?,
        pvx: it.next().unwrap()?,
        pvy: it.next().unwrap()?,
    })
}

/// Static solve followed by the perturbation solves, sharing one
/// factorization. `hint` seeds the pressurized set (e.g. from the previous
/// time step); it does not change the converged result.
#[allow(clippy::too_many_arguments)]
pub fn solve_film(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    settings: &SolverSettings,
    hint: Option<&ActiveRegion>,
) -> FilmResult<PressureSolution> {
    let state = state.position_only();
    let (p0, active, operator, sol) = clamped_field(geom, lub, op, &state, grid, settings, hint)?;
    let perturbations = perturbations_with(
        &operator,
        sol.factor.as_ref(),
        &p0,
        &active,
        geom,
        lub,
        op,
        &state,
        grid,
        settings,
    )?;
    Ok(PressureSolution {
        p0,
        active,
        perturbations,
    })
}

/// Discrete static system at `state` on a given node set, for residual checks.
pub fn static_system(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    state: &ShaftState,
    grid: &Grid,
    mask: Vec<bool>,
) -> DiscreteSystem {
    let state = state.position_only();
    DiscreteSystem {
        operator: FilmOperator::assemble(geom, lub, &state, grid),
        source: transient_source(&state, op.omega, grid),
        mask,
    }
}
