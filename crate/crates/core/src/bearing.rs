//! Bearing geometry, lubricant, rotor and shaft kinematic state.
//!
//! Angles follow the film-thickness convention
//!
//! ```text
//! h(θ) = c + e·cos(θ − θ_att) = c + x·sin θ + y·cos θ
//! ```
//!
//! so the y displacement multiplies `cos θ` and the attitude angle `θ_att`
//! is measured from the y axis towards x. The load angle uses the same axis.

use std::f64::consts::PI;

use crate::error::{FilmError, FilmResult};

/// Journal radius, axial length and radial clearance, all in metres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BearingGeometry {
    pub radius: f64,
    pub length: f64,
    pub clearance: f64,
}

impl BearingGeometry {
    pub fn new(radius: f64, length: f64, clearance: f64) -> FilmResult<Self> {
        let geom = Self {
            radius,
            length,
            clearance,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> FilmResult<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(FilmError::param("radius", "must be positive"));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(FilmError::param("length", "must be positive"));
        }
        if !(self.clearance.is_finite() && self.clearance > 0.0) {
            return Err(FilmError::param("clearance", "must be positive"));
        }
        if self.clearance >= 0.01 * self.radius {
            return Err(FilmError::param(
                "clearance",
                format!(
                    "thin-film model needs c < 0.01·r (c = {:e} m, r = {:e} m)",
                    self.clearance, self.radius
                ),
            ));
        }
        Ok(())
    }
}

/// Newtonian lubricant with constant dynamic viscosity [Pa·s].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lubricant {
    pub viscosity: f64,
}

impl Lubricant {
    pub fn new(viscosity: f64) -> FilmResult<Self> {
        if !(viscosity.is_finite() && viscosity > 0.0) {
            return Err(FilmError::param("viscosity", "must be positive"));
        }
        Ok(Self { viscosity })
    }
}

/// Equivalent mass of the gear/shaft assembly [kg].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotorProperties {
    pub mass: f64,
}

impl RotorProperties {
    pub fn new(mass: f64) -> FilmResult<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(FilmError::param("mass", "must be positive"));
        }
        Ok(Self { mass })
    }
}

/// Shaft angular speed [rad/s].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingPoint {
    pub omega: f64,
}

impl OperatingPoint {
    pub fn new(omega: f64) -> FilmResult<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(FilmError::param("omega", "must be positive"));
        }
        Ok(Self { omega })
    }

    pub fn from_rpm(rpm: f64) -> FilmResult<Self> {
        Self::new(rpm_to_rad_per_s(rpm))
    }

    pub fn rpm(&self) -> f64 {
        self.omega * 60.0 / (2.0 * PI)
    }
}

pub fn rpm_to_rad_per_s(rpm: f64) -> f64 {
    rpm * 2.0 * PI / 60.0
}

/// Shaft-centre displacement from the bearing centre [m] and its velocity [m/s].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ShaftState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl ShaftState {
    pub fn at_rest(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            vx: 0.0,
            vy: 0.0,
        }
    }

    pub fn from_polar(e: f64, theta_att: f64) -> Self {
        let (x, y) = to_cartesian(e, theta_att);
        Self::at_rest(x, y)
    }

    pub fn with_velocity(self, vx: f64, vy: f64) -> Self {
        Self { vx, vy, ..self }
    }

    pub fn eccentricity(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn eccentricity_ratio(&self, geom: &BearingGeometry) -> f64 {
        self.eccentricity() / geom.clearance
    }

    pub fn attitude_angle(&self) -> f64 {
        to_polar(self).1
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    /// Same position, zero velocity.
    pub fn position_only(&self) -> Self {
        Self::at_rest(self.x, self.y)
    }

    pub fn check_inside(&self, geom: &BearingGeometry) -> FilmResult<()> {
        let e = self.eccentricity();
        if !(e < geom.clearance) {
            return Err(FilmError::InvalidState {
                eccentricity: e,
                clearance: geom.clearance,
            });
        }
        Ok(())
    }
}

/// `(e, θ_att)` of a shaft position; `θ_att` is 0 for the concentric shaft.
pub fn to_polar(state: &ShaftState) -> (f64, f64) {
    let e = state.eccentricity();
    if e == 0.0 {
        return (0.0, 0.0);
    }
    (e, state.x.atan2(state.y))
}

pub fn to_cartesian(e: f64, theta_att: f64) -> (f64, f64) {
    (e * theta_att.sin(), e * theta_att.cos())
}

/// Film thickness `h = c + x sin θ + y cos θ` [m].
pub fn film_thickness(theta: f64, state: &ShaftState, geom: &BearingGeometry) -> FilmResult<f64> {
    state.check_inside(geom)?;
    Ok(film_thickness_unchecked(theta, state, geom.clearance))
}

#[inline]
pub(crate) fn film_thickness_unchecked(theta: f64, state: &ShaftState, clearance: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    clearance + state.x * s + state.y * c
}

/// `∂h/∂θ = x cos θ − y sin θ` [m/rad].
pub fn film_thickness_dtheta(theta: f64, state: &ShaftState) -> f64 {
    let (s, c) = theta.sin_cos();
    state.x * c - state.y * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn geom() -> BearingGeometry {
        BearingGeometry::new(0.055, 0.034, 5e-5).unwrap()
    }

    #[test]
    fn concentric_film_is_clearance() {
        let s = ShaftState::default();
        for k in 0..12 {
            let th = k as f64 * 0.5;
            assert_eq!(film_thickness(th, &s, &geom()).unwrap(), 5e-5);
            assert_eq!(film_thickness_dtheta(th, &s), 0.0);
        }
    }

    #[test]
    fn film_extremes_along_attitude_line() {
        let att = 0.83;
        let s = ShaftState::from_polar(2.5e-5, att);
        assert_relative_eq!(film_thickness(att, &s, &geom()).unwrap(), 7.5e-5, max_relative = 1e-12);
        assert_relative_eq!(
            film_thickness(att + PI, &s, &geom()).unwrap(),
            2.5e-5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn dtheta_at_zero() {
        let s = ShaftState::at_rest(1e-5, 0.0);
        assert_eq!(film_thickness_dtheta(0.0, &s), 1e-5);
    }

    #[test]
    fn outside_state_rejected() {
        let s = ShaftState::at_rest(5e-5, 0.0);
        assert!(matches!(
            film_thickness(0.0, &s, &geom()),
            Err(FilmError::InvalidState { .. })
        ));
    }

    #[test]
    fn polar_examples() {
        let (e, att) = to_polar(&ShaftState::at_rest(0.0, 3e-5));
        assert_eq!((e, att), (3e-5, 0.0));
        let (x, y) = to_cartesian(2e-5, PI / 2.0);
        assert_relative_eq!(x, 2e-5, max_relative = 1e-15);
        assert!(y.abs() < 1e-20);
        let (e, _) = to_polar(&ShaftState::at_rest(-2e-5, -3e-5));
        assert_relative_eq!(e, 13f64.sqrt() * 1e-5, max_relative = 1e-15);
        assert_eq!(to_polar(&ShaftState::default()), (0.0, 0.0));
    }

    #[test]
    fn geometry_validation() {
        assert!(BearingGeometry::new(0.055, 0.034, 5.5e-4).is_err());
        assert!(BearingGeometry::new(-1.0, 0.034, 5e-5).is_err());
        assert!(Lubricant::new(0.0).is_err());
        assert!(RotorProperties::new(-0.5).is_err());
        assert_relative_eq!(OperatingPoint::from_rpm(3000.0).unwrap().omega, 314.159_265_358_979_3);
    }

    proptest! {
        #[test]
        fn polar_round_trip(e in 1e-9f64..4.9e-5, att in -3.1f64..3.1) {
            let (x, y) = to_cartesian(e, att);
            let (e2, att2) = to_polar(&ShaftState::at_rest(x, y));
            let (x2, y2) = to_cartesian(e2, att2);
            prop_assert!((e2 - e).abs() <= 1e-12 * e);
            prop_assert!((x2 - x).abs() <= 1e-12 * e && (y2 - y).abs() <= 1e-12 * e);
        }

        #[test]
        fn film_positive_and_bounded(eps in 0.0f64..0.99, att in 0.0f64..6.28, th in 0.0f64..6.28) {
            let g = geom();
            let s = ShaftState::from_polar(eps * g.clearance, att);
            let h = film_thickness(th, &s, &g).unwrap();
            let e = s.eccentricity();
            prop_assert!(h > 0.0);
            prop_assert!(h >= g.clearance - e - 1e-18 && h <= g.clearance + e + 1e-18);
        }

        #[test]
        fn dtheta_matches_central_difference(eps in 0.05f64..0.95, att in 0.0f64..6.28, th in 0.0f64..6.28) {
            let g = geom();
            let s = ShaftState::from_polar(eps * g.clearance, att);
            let d = 1e-6;
            let fd = (film_thickness(th + d, &s, &g).unwrap() - film_thickness(th - d, &s, &g).unwrap()) / (2.0 * d);
            let an = film_thickness_dtheta(th, &s);
            // relative to the eccentricity scale, since ∂h/∂θ crosses zero
            prop_assert!((fd - an).abs() <= 1e-6 * s.eccentricity());
        }
    }
}
