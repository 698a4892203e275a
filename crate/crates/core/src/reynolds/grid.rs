use std::f64::consts::PI;
use std::ops::Index;

use crate::error::{FilmError, FilmResult};

/// Uniform θ×z finite-difference grid.
///
/// θ is periodic with nodes at `i·Δθ`, `i = 0..n_theta`; node `n_theta` is
/// identified with node 0. z runs over `[0, L]` with both end rows included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n_theta: usize,
    n_z: usize,
    length: f64,
}

impl Grid {
    pub fn new(n_theta: usize, n_z: usize, length: f64) -> FilmResult<Self> {
        if n_theta < 16 || n_theta % 2 != 0 {
            return Err(FilmError::GridShape(format!(
                "n_theta must be even and >= 16, got {n_theta}"
            )));
        }
        if n_z < 9 || n_z % 2 != 1 {
            return Err(FilmError::GridShape(format!(
                "n_z must be odd and >= 9, got {n_z}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(FilmError::GridShape(format!("axial length must be positive, got {length}")));
        }
        Ok(Self {
            n_theta,
            n_z,
            length,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn d_z(&self) -> f64 {
        self.length / (self.n_z - 1) as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * self.d_theta()
    }

    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.d_z()
    }

    /// Flat index, row-major in θ then z.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n_z + j
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_z
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub(crate) fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.n_theta - 1
        } else {
            i - 1
        }
    }

    #[inline]
    pub(crate) fn next(&self, i: usize) -> usize {
        if i + 1 == self.n_theta {
            0
        } else {
            i + 1
        }
    }

    /// Both grid dimensions doubled in interval count.
    pub fn refined(&self) -> Self {
        Self {
            n_theta: 2 * self.n_theta,
            n_z: 2 * (self.n_z - 1) + 1,
            length: self.length,
        }
    }
}

/// Node counts only; the axial length comes from the bearing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_z: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_theta: 72,
            n_z: 17,
        }
    }
}

impl GridSpec {
    pub fn build(&self, length: f64) -> FilmResult<Grid> {
        Grid::new(self.n_theta, self.n_z, length)
    }
}

/// Scalar nodal field on a [`Grid`], row-major in θ then z.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureField {
    n_theta: usize,
    n_z: usize,
    values: Vec<f64>,
}

impl PressureField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            n_theta: grid.n_theta(),
            n_z: grid.n_z(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<f64>) -> FilmResult<Self> {
        if values.len() != grid.len() {
            return Err(FilmError::GridShape(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            n_theta: grid.n_theta(),
            n_z: grid.n_z(),
            values,
        })
    }

    /// Field from a function of (θ, z).
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_theta() {
            for j in 0..grid.n_z() {
                values.push(f(grid.theta(i), grid.z(j)));
            }
        }
        Self {
            n_theta: grid.n_theta(),
            n_z: grid.n_z(),
            values,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_theta, self.n_z)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn matches(&self, grid: &Grid) -> FilmResult<()> {
        if self.shape() != (grid.n_theta(), grid.n_z()) {
            return Err(FilmError::GridShape(format!(
                "field shape {:?} does not match grid {}x{}",
                self.shape(),
                grid.n_theta(),
                grid.n_z()
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for PressureField {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.values[i * self.n_z + j]
    }
}

/// Pressurized (non-cavitated) part of the film.
#[derive(Clone, Debug, PartialEq)]
pub struct ActiveRegion {
    pub mask: Vec<bool>,
    /// First pressurized θ node of the circumferential extent, `None` if empty.
    pub theta_start: Option<f64>,
    /// Last pressurized θ node of the circumferential extent, `None` if empty.
    pub theta_end: Option<f64>,
}

impl ActiveRegion {
    pub fn empty(grid: &Grid) -> Self {
        Self {
            mask: vec![false; grid.len()],
            theta_start: None,
            theta_end: None,
        }
    }

    pub fn from_mask(grid: &Grid, mask: Vec<bool>) -> Self {
        let (start, end) = match circumferential_extent(grid, &mask) {
            Some((s, e)) => (Some(grid.theta(s)), Some(grid.theta(e))),
            None => (None, None),
        };
        Self {
            mask,
            theta_start: start,
            theta_end: end,
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_active(&self, grid: &Grid, i: usize, j: usize) -> bool {
        self.mask[grid.idx(i, j)]
    }
}

/// Columns bounding the mask: the arc that remains after removing the longest
/// cyclic run of fully inactive columns. Returns `(start, end)` column indices.
pub(crate) fn circumferential_extent(grid: &Grid, mask: &[bool]) -> Option<(usize, usize)> {
    let n = grid.n_theta();
    let col_active: Vec<bool> = (0..n)
        .map(|i| (0..grid.n_z()).any(|j| mask[grid.idx(i, j)]))
        .collect();
    let (gap_start, gap_len) = longest_inactive_run(&col_active)?;
    if gap_len == 0 {
        return Some((0, n - 1));
    }
    let start = (gap_start + gap_len) % n;
    let end = (gap_start + n - 1) % n;
    Some((start, end))
}

/// Longest cyclic run of `false`: `(first index, length)`.
/// `None` if every entry is `false`; length 0 if every entry is `true`.
pub(crate) fn longest_inactive_run(cols: &[bool]) -> Option<(usize, usize)> {
    let n = cols.len();
    let first_active = cols.iter().position(|&a| a)?;
    let mut best = (0, 0);
    let mut run_start = None;
    // walk one full turn starting just after an active column
    for step in 1..=n {
        let i = (first_active + step) % n;
        if !cols[i] {
            if run_start.is_none() {
                run_start = Some((i, step));
            }
        } else if let Some((s, s_step)) = run_start.take() {
            let len = step - s_step;
            if len > best.1 {
                best = (s, len);
            }
        }
    }
    Some(best)
}
