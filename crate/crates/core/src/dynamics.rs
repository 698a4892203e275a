//! Journal equation of motion, RK4 orbit integration and static equilibrium.
//!
//! The film force is linearized about the current shaft position (at zero
//! velocity) and the linearization is frozen for one RK4 step:
//!
//! ```text
//! m·Δẍ = W(t) − F0 − k·Δx − b·ẋ
//! ```
//!
//! `Δx` is the displacement from the step's linearization point, so it
//! restarts at zero every time the coefficients are refreshed. The velocity
//! enters the damping term as is, since the reference film is static.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::bearing::{
    BearingGeometry, Lubricant, OperatingPoint, RotorProperties, ShaftState,
};
use crate::error::{FilmError, FilmResult};
use crate::forces::{integrate_force, DynamicCoefficients, ForceVector};
use crate::reynolds::{solve_film, solve_static, ActiveRegion, Grid, GridSpec, SolverSettings};

/// Largest `|λ|·h` accepted for the frozen linear system. The RK4 stability
/// region contains the left half-disc of radius 2.6.
const RK4_STABLE_RADIUS: f64 = 2.4;

/// Eccentricity ratio above which equilibria are rejected.
pub const MAX_EQUILIBRIUM_ECCENTRICITY: f64 = 0.98;

/// Applied load: magnitude `W` at angle `φ` from the y axis, plus an optional
/// horizontal ripple `α·W·sin(ωt)` at shaft speed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoadSpec {
    pub magnitude: f64,
    pub angle: f64,
    pub ripple: f64,
}

impl LoadSpec {
    pub fn vertical(magnitude: f64) -> Self {
        Self {
            magnitude,
            angle: 0.0,
            ripple: 0.0,
        }
    }

    pub fn with_ripple(self, ripple: f64) -> Self {
        Self { ripple, ..self }
    }

    pub fn validate(&self) -> FilmResult<()> {
        if !(self.magnitude.is_finite() && self.magnitude >= 0.0) {
            return Err(FilmError::param("load magnitude", "must be finite and >= 0"));
        }
        if !self.angle.is_finite() {
            return Err(FilmError::param("load angle", "must be finite"));
        }
        if !(self.ripple.is_finite() && self.ripple >= 0.0) {
            return Err(FilmError::param("ripple", "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.ripple == 0.0
    }

    /// Constant part `(W sin φ, W cos φ)`.
    pub fn steady(&self) -> ForceVector {
        Vector2::new(
            self.magnitude * self.angle.sin(),
            self.magnitude * self.angle.cos(),
        )
    }

    pub fn at(&self, t: f64, omega: f64) -> ForceVector {
        let mut w = self.steady();
        if self.ripple != 0.0 {
            w.x += self.ripple * self.magnitude * (omega * t).sin();
        }
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationConfig {
    /// Time step [s]. Coefficients are frozen over a step, which is split into
    /// as many RK4 substeps as the frozen system's stability limit requires.
    pub dt: f64,
    pub t_end: f64,
    /// Settling threshold on `|W − F0|` [N]; `None` means 1 % of W, at least 1 N.
    pub settle_tol_force: Option<f64>,
    pub settle_tol_velocity: f64,
    /// Coefficients are recomputed every `refresh_interval` time steps.
    pub refresh_interval: usize,
    /// Keep every n-th sample (the final sample is always kept).
    pub save_every: usize,
    pub grid: GridSpec,
    pub solver: SolverSettings,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dt: 1e-5,
            t_end: 1.0,
            settle_tol_force: None,
            settle_tol_velocity: 1e-6,
            refresh_interval: 1,
            save_every: 1,
            grid: GridSpec::default(),
            solver: SolverSettings::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> FilmResult<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(FilmError::param("dt", "must be positive"));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(FilmError::param("t_end", "must be at least dt"));
        }
        if let Some(f) = self.settle_tol_force {
            if !(f > 0.0) {
                return Err(FilmError::param("settle_tol_force", "must be positive"));
            }
        }
        if !(self.settle_tol_velocity > 0.0) {
            return Err(FilmError::param("settle_tol_velocity", "must be positive"));
        }
        if self.refresh_interval < 1 {
            return Err(FilmError::param("refresh_interval", "must be at least 1"));
        }
        if self.save_every < 1 {
            return Err(FilmError::param("save_every", "must be at least 1"));
        }
        self.solver.validate()
    }

    pub fn force_tolerance(&self, load: &LoadSpec) -> f64 {
        self.settle_tol_force
            .unwrap_or_else(|| (0.01 * load.magnitude).max(1.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: ShaftState,
    /// Linearized film force including the damping term [N].
    pub film_force: ForceVector,
    /// Position-dependent part of the film force [N].
    pub static_force: ForceVector,
    pub load: ForceVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    HorizonReached,
    Settled,
    Contact,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::HorizonReached => "horizon-reached",
            Termination::Settled => "settled",
            Termination::Contact => "contact",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// Coefficients at the last sample.
    pub final_coefficients: DynamicCoefficients,
    /// Time steps of length `dt` taken; one film solve each (with the default
    /// refresh interval).
    pub steps: usize,
    /// RK4 substeps taken. A step is subdivided when the frozen
    /// system's fastest mode would make a single RK4 step of length `dt` unstable.
    pub substeps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }
}

/// Accelerations `(Δẍ, Δÿ)`; `delta = (Δx, Δy, ẋ, ẏ)`.
pub fn eom_rhs(
    delta: &Vector4<f64>,
    coeffs: &DynamicCoefficients,
    load: &ForceVector,
    rotor: &RotorProperties,
) -> Vector2<f64> {
    let dx = Vector2::new(delta[0], delta[1]);
    let v = Vector2::new(delta[2], delta[3]);
    (load - coeffs.f0 - coeffs.k * dx - coeffs.b * v) / rotor.mass
}

/// One classic RK4 step of the frozen linearized system. The load is
/// evaluated at the stage times.
pub fn rk4_step(
    delta: &Vector4<f64>,
    t: f64,
    dt: f64,
    coeffs: &DynamicCoefficients,
    rotor: &RotorProperties,
    load_fn: impl Fn(f64) -> ForceVector,
) -> Vector4<f64> {
    let f = |y: &Vector4<f64>, t: f64| -> Vector4<f64> {
        let a = eom_rhs(y, coeffs, &load_fn(t), rotor);
        Vector4::new(y[2], y[3], a.x, a.y)
    };
    let k1 = f(delta, t);
    let k2 = f(&(delta + k1 * (0.5 * dt)), t + 0.5 * dt);
    let k3 = f(&(delta + k2 * (0.5 * dt)), t + 0.5 * dt);
    let k4 = f(&(delta + k3 * dt), t + dt);
    delta + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// Largest RK4 step that keeps the frozen linear system inside the
/// stability region.
pub fn stable_step(coeffs: &DynamicCoefficients, rotor: &RotorProperties) -> f64 {
    let km = coeffs.k / rotor.mass;
    let bm = coeffs.b / rotor.mass;
    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        -km[(0, 0)], -km[(0, 1)], -bm[(0, 0)], -bm[(0, 1)],
        -km[(1, 0)], -km[(1, 1)], -bm[(1, 0)], -bm[(1, 1)],
    );
    let radius = a
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |r, l| r.max(l.norm()));
    if radius > 0.0 && radius.is_finite() {
        RK4_STABLE_RADIUS / radius
    } else {
        f64::INFINITY
    }
}

/// `e ≥ c`.
pub fn detect_contact(state: &ShaftState, geom: &BearingGeometry) -> bool {
    state.eccentricity() >= geom.clearance
}

/// Everything `simulate` needs besides the initial state and settings.
#[derive(Clone, Copy, Debug)]
pub struct BearingSystem {
    pub geom: BearingGeometry,
    pub lubricant: Lubricant,
    pub rotor: RotorProperties,
    pub operating: OperatingPoint,
}

struct Linearization {
    origin: Vector2<f64>,
    coeffs: DynamicCoefficients,
    active: ActiveRegion,
}

impl Linearization {
    fn at(
        sys: &BearingSystem,
        state: &ShaftState,
        grid: &Grid,
        settings: &SolverSettings,
        hint: Option<&ActiveRegion>,
    ) -> FilmResult<Self> {
        let sol = solve_film(&sys.geom, &sys.lubricant, &sys.operating, state, grid, settings, hint)?;
        let coeffs = DynamicCoefficients::from_solution(&sol, grid, &sys.geom)?;
        Ok(Self {
            origin: Vector2::new(state.x, state.y),
            coeffs,
            active: sol.active,
        })
    }

    fn offset(&self, state: &ShaftState) -> Vector2<f64> {
        Vector2::new(state.x, state.y) - self.origin
    }

    fn sample(&self, t: f64, state: ShaftState, load: ForceVector) -> Sample {
        let v = Vector2::new(state.vx, state.vy);
        let static_force = self.coeffs.f0 + self.coeffs.k * self.offset(&state);
        Sample {
            t,
            state,
            film_force: static_force + self.coeffs.b * v,
            static_force,
            load,
        }
    }
}

/// Integrate the journal orbit from `initial` until contact, settling or the horizon.
pub fn simulate(
    initial: ShaftState,
    load: &LoadSpec,
    sys: &BearingSystem,
    config: &SimulationConfig,
) -> FilmResult<Trajectory> {
    load.validate()?;
    config.validate()?;
    sys.geom.validate()?;
    let grid = config.grid.build(sys.geom.length)?;
    let omega = sys.operating.omega;
    let load_fn = |t: f64| load.at(t, omega);

    if detect_contact(&initial, &sys.geom) {
        return Ok(Trajectory {
            samples: vec![Sample {
                t: 0.0,
                state: initial,
                film_force: ForceVector::zeros(),
                static_force: ForceVector::zeros(),
                load: load_fn(0.0),
            }],
            termination: Termination::Contact,
            final_coefficients: DynamicCoefficients::zero(),
            steps: 0,
            substeps: 0,
        });
    }

    let at_step = |step: usize| move |e: FilmError| FilmError::AtStep {
        step,
        source: Box::new(e),
    };
    let force_tol = config.force_tolerance(load);
    let mut state = initial;
    let mut lin = Linearization::at(sys, &state, &grid, &config.solver, None).map_err(at_step(0))?;
    let mut samples = vec![lin.sample(0.0, state, load_fn(0.0))];
    let mut substeps = 0usize;
    let mut t = 0.0;
    let n_intervals = (config.t_end / config.dt).round().max(1.0) as usize;

    for n in 1..=n_intervals {
        if n > 1 && (n - 1) % config.refresh_interval == 0 {
            lin = Linearization::at(sys, &state, &grid, &config.solver, Some(&lin.active))
                .map_err(at_step(n - 1))?;
        }
        let t_target = n as f64 * config.dt;
        let h_max = stable_step(&lin.coeffs, &sys.rotor);
        while t < t_target {
            let h = (t_target - t).min(h_max);
            let off = lin.offset(&state);
            let y = Vector4::new(off.x, off.y, state.vx, state.vy);
            let y1 = rk4_step(&y, t, h, &lin.coeffs, &sys.rotor, load_fn);
            state = ShaftState {
                x: lin.origin.x + y1[0],
                y: lin.origin.y + y1[1],
                vx: y1[2],
                vy: y1[3],
            };
            t = if t + h >= t_target { t_target } else { t + h };
            substeps += 1;
            if detect_contact(&state, &sys.geom) {
                samples.push(lin.sample(t, state, load_fn(t)));
                return Ok(Trajectory {
                    samples,
                    termination: Termination::Contact,
                    final_coefficients: lin.coeffs,
                    steps: n,
                    substeps,
                });
            }
        }
        let sample = lin.sample(t, state, load_fn(t));
        let settled = load.is_constant()
            && (sample.load - sample.static_force).norm() < force_tol
            && state.speed() < config.settle_tol_velocity;
        if settled || n == n_intervals || n % config.save_every == 0 {
            samples.push(sample);
        }
        if settled {
            return Ok(Trajectory {
                samples,
                termination: Termination::Settled,
                final_coefficients: lin.coeffs,
                steps: n,
                substeps,
            });
        }
    }
    Ok(Trajectory {
        samples,
        termination: Termination::HorizonReached,
        final_coefficients: lin.coeffs,
        steps: n_intervals,
        substeps,
    })
}

fn static_force_at(
    geom: &BearingGeometry,
    lub: &Lubricant,
    op: &OperatingPoint,
    pos: &Vector2<f64>,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<ForceVector> {
    let (p0, _) = solve_static(geom, lub, op, &ShaftState::at_rest(pos.x, pos.y), grid, settings)?;
    integrate_force(&p0, grid, geom)
}

/// Static equilibrium `F0(x, y) = (W sin φ, W cos φ)` by damped Newton
/// iteration with the film stiffness as Jacobian.
pub fn find_equilibrium(
    load: &LoadSpec,
    op: &OperatingPoint,
    geom: &BearingGeometry,
    lub: &Lubricant,
    grid: &Grid,
    settings: &SolverSettings,
) -> FilmResult<ShaftState> {
    load.validate()?;
    if load.magnitude == 0.0 {
        return Ok(ShaftState::default());
    }
    let target = load.steady();
    let tol = 1e-7 * load.magnitude;
    let limit = MAX_EQUILIBRIUM_ECCENTRICITY * geom.clearance;

    // Seed: ε = 0.3, rotated so the film force points along the load.
    let probe_e = 0.3 * geom.clearance;
    let mut att = load.angle + std::f64::consts::FRAC_PI_2;
    let probe = Vector2::new(probe_e * att.sin(), probe_e * att.cos());
    let f = static_force_at(geom, lub, op, &probe, grid, settings)?;
    att += load.angle - f.x.atan2(f.y);
    let mut pos = Vector2::new(probe_e * att.sin(), probe_e * att.cos());

    let mut hint: Option<ActiveRegion> = None;
    let mut pinned = 0;
    const MAX_NEWTON: usize = 100;
    for _ in 0..MAX_NEWTON {
        let state = ShaftState::at_rest(pos.x, pos.y);
        let sol = solve_film(geom, lub, op, &state, grid, settings, hint.as_ref())?;
        let coeffs = DynamicCoefficients::from_solution(&sol, grid, geom)?;
        hint = Some(sol.active);
        let res = coeffs.f0 - target;
        let res_norm = res.norm();
        if res_norm <= tol {
            return Ok(state);
        }
        let step = newton_step(&coeffs.k, &res).ok_or(FilmError::NoConvergence {
            what: "equilibrium Newton iteration (singular stiffness)",
            iterations: 0,
            residual: res_norm,
        })?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let mut trial = pos + step * lambda;
            let clipped = trial.norm() > limit;
            if clipped {
                trial *= limit / trial.norm();
            }
            let f = static_force_at(geom, lub, op, &trial, grid, settings)?;
            if (f - target).norm() < res_norm {
                accepted = Some((trial, clipped));
                break;
            }
            lambda *= 0.5;
        }
        let Some((next, clipped)) = accepted else {
            return Err(FilmError::NoConvergence {
                what: "equilibrium Newton line search",
                iterations: MAX_NEWTON,
                residual: res_norm,
            });
        };
        pinned = if clipped { pinned + 1 } else { 0 };
        if pinned >= 3 {
            return Err(FilmError::OutOfRange {
                eps: next.norm() / geom.clearance,
                limit: MAX_EQUILIBRIUM_ECCENTRICITY,
            });
        }
        pos = next;
    }
    Err(FilmError::NoConvergence {
        what: "equilibrium Newton iteration",
        iterations: MAX_NEWTON,
        residual: f64::NAN,
    })
}

fn newton_step(k: &Matrix2<f64>, residual: &Vector2<f64>) -> Option<Vector2<f64>> {
    k.try_inverse().map(|inv| -(inv * residual))
}
