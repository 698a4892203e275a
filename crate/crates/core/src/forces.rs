//! Film force and linearized stiffness/damping coefficients.
//!
//! Every quantity is `-r ∬ q(θ, z)·(sin θ, cos θ) dθ dz` for some field `q`,
//! evaluated by tensor-product composite Simpson quadrature over the whole
//! grid. Cavitated nodes hold zero, so the integral equals the one taken over
//! the pressurized arc only.

use nalgebra::{Matrix2, Vector2};

use crate::bearing::BearingGeometry;
use crate::error::{FilmError, FilmResult};
use crate::reynolds::{Grid, PressureField, PressureSolution};

/// Film force on the shaft [N].
pub type ForceVector = Vector2<f64>;

/// Static force plus stiffness `k = ∂F/∂(x, y)` [N/m] and damping
/// `b = ∂F/∂(ẋ, ẏ)` [N·s/m]. Row index is the force component, column index
/// the displacement/velocity component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicCoefficients {
    pub f0: ForceVector,
    pub k: Matrix2<f64>,
    pub b: Matrix2<f64>,
}

impl DynamicCoefficients {
    pub fn zero() -> Self {
        Self {
            f0: ForceVector::zeros(),
            k: Matrix2::zeros(),
            b: Matrix2::zeros(),
        }
    }

    pub fn from_solution(sol: &PressureSolution, grid: &Grid, geom: &BearingGeometry) -> FilmResult<Self> {
        Ok(Self {
            f0: integrate_force(&sol.p0, grid, geom)?,
            k: stiffness_matrix(&sol.perturbations.px, &sol.perturbations.py, grid, geom)?,
            b: damping_matrix(&sol.perturbations.pvx, &sol.perturbations.pvy, grid, geom)?,
        })
    }

    /// Linearized film force at displacement `dx` and velocity `v`.
    pub fn force(&self, dx: &Vector2<f64>, v: &Vector2<f64>) -> ForceVector {
        self.f0 + self.k * dx + self.b * v
    }
}

/// Simpson weights for the periodic θ direction (`2,4,2,4,…` times Δθ/3).
fn theta_weights(grid: &Grid) -> Vec<f64> {
    let h = grid.d_theta() / 3.0;
    (0..grid.n_theta())
        .map(|i| if i % 2 == 0 { 2.0 * h } else { 4.0 * h })
        .collect()
}

/// Simpson weights along z (`1,4,2,…,2,4,1` times Δz/3).
fn z_weights(grid: &Grid) -> Vec<f64> {
    let n = grid.n_z();
    let h = grid.d_z() / 3.0;
    (0..n)
        .map(|j| {
            if j == 0 || j == n - 1 {
                h
            } else if j % 2 == 1 {
                4.0 * h
            } else {
                2.0 * h
            }
        })
        .collect()
}

fn check_parity(grid: &Grid) -> FilmResult<()> {
    if grid.n_theta() % 2 != 0 || grid.n_z() % 2 != 1 {
        return Err(FilmError::GridShape(format!(
            "Simpson quadrature needs even interval counts, got {} x {} nodes",
            grid.n_theta(),
            grid.n_z()
        )));
    }
    Ok(())
}

/// `∬ f dθ dz` over `[0, 2π) × [0, L]`.
pub fn simpson_2d(field: &PressureField, grid: &Grid) -> FilmResult<f64> {
    weighted_integrals(field, grid, &[|_: f64| 1.0]).map(|v| v[0])
}

fn weighted_integrals<const N: usize>(
    field: &PressureField,
    grid: &Grid,
    kernels: &[fn(f64) -> f64; N],
) -> FilmResult<[f64; N]> {
    check_parity(grid)?;
    field.matches(grid)?;
    let wt = theta_weights(grid);
    let wz = z_weights(grid);
    let vals = field.values();
    let mut out = [0.0; N];
    for i in 0..grid.n_theta() {
        let row = &vals[grid.idx(i, 0)..grid.idx(i, 0) + grid.n_z()];
        let col: f64 = row.iter().zip(&wz).map(|(v, w)| v * w).sum();
        if col == 0.0 {
            continue;
        }
        let th = grid.theta(i);
        for (o, kern) in out.iter_mut().zip(kernels) {
            *o += wt[i] * kern(th) * col;
        }
    }
    Ok(out)
}

fn projected(field: &PressureField, grid: &Grid, geom: &BearingGeometry) -> FilmResult<Vector2<f64>> {
    let [s, c] = weighted_integrals(field, grid, &[f64::sin, f64::cos])?;
    Ok(Vector2::new(-geom.radius * s, -geom.radius * c))
}

/// `(F_x, F_y) = -r ∬ p (sin θ, cos θ) dθ dz`.
pub fn integrate_force(field: &PressureField, grid: &Grid, geom: &BearingGeometry) -> FilmResult<ForceVector> {
    projected(field, grid, geom)
}

/// Columns are the x- and y-perturbation fields.
pub fn stiffness_matrix(
    px: &PressureField,
    py: &PressureField,
    grid: &Grid,
    geom: &BearingGeometry,
) -> FilmResult<Matrix2<f64>> {
    let cx = projected(px, grid, geom)?;
    let cy = projected(py, grid, geom)?;
    Ok(Matrix2::from_columns(&[cx, cy]))
}

/// Columns are the ẋ- and ẏ-perturbation fields.
pub fn damping_matrix(
    pvx: &PressureField,
    pvy: &PressureField,
    grid: &Grid,
    geom: &BearingGeometry,
) -> FilmResult<Matrix2<f64>> {
    stiffness_matrix(pvx, pvy, grid, geom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup() -> (Grid, BearingGeometry) {
        let geom = BearingGeometry::new(0.055, 0.034, 5e-5).unwrap();
        (Grid::new(144, 33, geom.length).unwrap(), geom)
    }

    #[test]
    fn zero_field_gives_zero_force_and_matrices() {
        let (grid, geom) = setup();
        let z = PressureField::zeros(&grid);
        assert_eq!(integrate_force(&z, &grid, &geom).unwrap(), ForceVector::zeros());
        assert_eq!(stiffness_matrix(&z, &z, &grid, &geom).unwrap(), Matrix2::zeros());
        assert_eq!(damping_matrix(&z, &z, &grid, &geom).unwrap(), Matrix2::zeros());
    }

    #[test]
    fn cosine_field_closed_form() {
        let (grid, geom) = setup();
        let p = 2.5e5;
        let f = PressureField::from_fn(&grid, |t, _| p * t.cos());
        let force = integrate_force(&f, &grid, &geom).unwrap();
        let exact = -geom.radius * p * PI * geom.length;
        assert!(force.x.abs() <= 1e-10 * exact.abs());
        assert!((force.y - exact).abs() <= 1e-10 * exact.abs());
    }

    #[test]
    fn simpson_constants_and_polynomials() {
        let (grid, geom) = setup();
        let one = PressureField::from_fn(&grid, |_, _| 1.0);
        let v = simpson_2d(&one, &grid).unwrap();
        assert!((v - 2.0 * PI * geom.length).abs() <= 1e-13 * v);
        let s = PressureField::from_fn(&grid, |t, _| t.sin());
        assert!(simpson_2d(&s, &grid).unwrap().abs() < 1e-12);
        let l = geom.length;
        let cubic = PressureField::from_fn(&grid, |_, z| 3.0 * z * z * z - z * z * l + 0.5 * l * l * z);
        // ∫ over z: 3L⁴/4 - L⁴/3 + L⁴/4, times 2π
        let exact = 2.0 * PI * l.powi(4) * (0.75 - 1.0 / 3.0 + 0.25);
        let got = simpson_2d(&cubic, &grid).unwrap();
        assert!((got - exact).abs() <= 1e-12 * exact.abs(), "{got} {exact}");
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let (grid, geom) = setup();
        let other = Grid::new(16, 9, geom.length).unwrap();
        let f = PressureField::zeros(&other);
        assert!(matches!(integrate_force(&f, &grid, &geom), Err(FilmError::GridShape(_))));
    }
}
