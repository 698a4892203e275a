//! Shaft orbit simulation for the ring-gear journal bearing of internal gear pumps.
//!
//! The oil film is solved from the Reynolds equation on a finite-difference
//! grid, linearized into stiffness and damping coefficients, and the journal
//! motion is integrated with a fourth-order Runge-Kutta scheme that
//! relinearizes the film at every step.

pub mod bearing;
pub mod cli;
pub mod error;
pub mod forces;
pub mod oracles;
pub mod reynolds;

pub use bearing::{BearingGeometry, Lubricant, OperatingPoint, RotorProperties, ShaftState};
pub use error::{FilmError, FilmResult};
pub use forces::{DynamicCoefficients, ForceVector};
pub use reynolds::{ActiveRegion, Grid, GridSpec, PressureField, PressureSolution, SolverSettings};
pub mod dynamics;
pub use dynamics::{BearingSystem, LoadSpec, SimulationConfig, Termination, Trajectory};
