//! Five-point discretization of `(1/r²)∂θ(a ∂θ p) + ∂z(a ∂z p)`, `a = h³/(12μ)`.
//!
//! The film coefficient depends on θ only, so every stencil weight is stored
//! per θ column. Half-node values `a_{i±1/2}` use the arithmetic mean of the
//! neighbouring nodal values, which keeps the operator symmetric.

use crate::bearing::{film_thickness_dtheta, film_thickness_unchecked, BearingGeometry, Lubricant, ShaftState};

use super::grid::Grid;

#[derive(Clone, Debug)]
pub struct FilmOperator {
    pub(crate) grid: Grid,
    /// Coupling to column `i-1`.
    pub(crate) west: Vec<f64>,
    /// Coupling to column `i+1`.
    pub(crate) east: Vec<f64>,
    /// Coupling to `j±1` in the same column.
    pub(crate) axial: Vec<f64>,
    /// Negative diagonal, `-(west + east + 2·axial)`.
    pub(crate) diag: Vec<f64>,
}

impl FilmOperator {
    pub fn assemble(geom: &BearingGeometry, lub: &Lubricant, state: &ShaftState, grid: &Grid) -> Self {
        let n = grid.n_theta();
        let coeff: Vec<f64> = (0..n)
            .map(|i| {
                let h = film_thickness_unchecked(grid.theta(i), state, geom.clearance);
                h * h * h / (12.0 * lub.viscosity)
            })
            .collect();
        let theta_scale = 1.0 / (geom.radius * geom.radius * grid.d_theta() * grid.d_theta());
        let z_scale = 1.0 / (grid.d_z() * grid.d_z());
        let mut west = Vec::with_capacity(n);
        let mut east = Vec::with_capacity(n);
        let mut axial = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let w = 0.5 * (coeff[grid.prev(i)] + coeff[i]) * theta_scale;
            let e = 0.5 * (coeff[i] + coeff[grid.next(i)]) * theta_scale;
            let a = coeff[i] * z_scale;
            west.push(w);
            east.push(e);
            axial.push(a);
            diag.push(-(w + e + 2.0 * a));
        }
        Self {
            grid: *grid,
            west,
            east,
            axial,
            diag,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `(A p)` at an interior node; `p` is taken as zero on the z end rows.
    #[inline]
    pub fn apply_at(&self, p: &[f64], i: usize, j: usize) -> f64 {
        let g = &self.grid;
        let nz = g.n_z();
        let k = i * nz + j;
        let mut v = self.diag[i] * p[k]
            + self.west[i] * p[g.prev(i) * nz + j]
            + self.east[i] * p[g.next(i) * nz + j];
        if j > 1 {
            v += self.axial[i] * p[k - 1];
        }
        if j + 2 < nz {
            v += self.axial[i] * p[k + 1];
        }
        v
    }
}

/// Right-hand side `(ω/2) ∂h/∂θ + ẋ sin θ + ẏ cos θ` on every node (zero on z end rows).
pub fn transient_source(state: &ShaftState, omega: f64, grid: &Grid) -> Vec<f64> {
    let mut f = vec![0.0; grid.len()];
    for i in 0..grid.n_theta() {
        let th = grid.theta(i);
        let (s, c) = th.sin_cos();
        let v = 0.5 * omega * film_thickness_dtheta(th, state) + state.vx * s + state.vy * c;
        for j in 1..grid.n_z() - 1 {
            f[grid.idx(i, j)] = v;
        }
    }
    f
}

/// Node-wise source from a function of θ only.
pub(crate) fn column_source(grid: &Grid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    for i in 0..grid.n_theta() {
        let v = f(grid.theta(i));
        for j in 1..grid.n_z() - 1 {
            out[grid.idx(i, j)] = v;
        }
    }
    out
}
