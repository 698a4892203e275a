#![allow(dead_code)]

use filmorbit::{BearingGeometry, Grid, Lubricant, OperatingPoint, RotorProperties, ShaftState, SolverSettings};
use filmorbit::dynamics::BearingSystem;

pub const C: f64 = 5e-5;

pub fn geom() -> BearingGeometry {
    BearingGeometry::new(0.055, 0.034, C).unwrap()
}

pub fn lub() -> Lubricant {
    Lubricant::new(0.041).unwrap()
}

pub fn op() -> OperatingPoint {
    OperatingPoint::from_rpm(3000.0).unwrap()
}

pub fn grid() -> Grid {
    Grid::new(72, 17, geom().length).unwrap()
}

pub fn grid_of(n_theta: usize, n_z: usize) -> Grid {
    Grid::new(n_theta, n_z, geom().length).unwrap()
}

pub fn settings() -> SolverSettings {
    SolverSettings::default()
}

pub fn system() -> BearingSystem {
    BearingSystem {
        geom: geom(),
        lubricant: lub(),
        rotor: RotorProperties::new(0.5).unwrap(),
        operating: op(),
    }
}

pub fn at_eps(eps: f64, theta_att: f64) -> ShaftState {
    ShaftState::from_polar(eps * C, theta_att)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
}
