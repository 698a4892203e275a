//! Linear and cavitating (clamped) solves of the discrete film equation.
//!
//! The cavitating problem is the complementarity system
//!
//! ```text
//! p ≥ 0,   w = -(A p - f) ≥ 0,   p·w = 0
//! ```
//!
//! whose solution is the fixed point of "solve, clamp negative pressures to
//! zero, re-solve". Two realizations are provided:
//!
//! * active-set: solve exactly on the current pressurized set with a banded
//!   Cholesky factorization, drop nodes that came out negative, add cavitated
//!   nodes whose complementarity multiplier went negative, repeat until the
//!   set is unchanged;
//! * projected SOR (Christopherson): Gauss-Seidel sweeps in fixed θ-major,
//!   z-minor order, clamping each update at zero.
//!
//! Both converge to the same discrete solution. The direct path works on the
//! half domain `z ≤ L/2`: every source in this crate is independent of z or
//! mirror-symmetric about mid-length, so the solution is mirror-symmetric too.

use super::banded::{BandCholesky, SymBand};
use super::grid::{longest_inactive_run, Grid};
use super::operator::FilmOperator;
use super::{CavitationScheme, SolverSettings};
use crate::error::{FilmError, FilmResult};

/// Factorization of the operator restricted to a pressurized set.
#[derive(Clone, Debug)]
pub(crate) struct WindowFactor {
    start: usize,
    width: usize,
    half_mask: Vec<bool>,
    chol: Option<BandCholesky>,
}

pub(crate) struct Clamped {
    pub p: Vec<f64>,
    pub mask: Vec<bool>,
    pub factor: Option<WindowFactor>,
}

fn half_rows(grid: &Grid) -> usize {
    (grid.n_z() - 1) / 2
}

fn half_from_full(grid: &Grid, mask: &[bool]) -> Vec<bool> {
    let m = half_rows(grid);
    let mut half = vec![false; grid.n_theta() * m];
    for i in 0..grid.n_theta() {
        for jj in 0..m {
            half[i * m + jj] = mask[grid.idx(i, jj + 1)];
        }
    }
    half
}

fn full_from_half(grid: &Grid, half: &[bool]) -> Vec<bool> {
    let m = half_rows(grid);
    let nz = grid.n_z();
    let mut mask = vec![false; grid.len()];
    for i in 0..grid.n_theta() {
        for j in 1..nz - 1 {
            let jj = j.min(nz - 1 - j) - 1;
            mask[grid.idx(i, j)] = half[i * m + jj];
        }
    }
    mask
}

/// Factor the half-domain system on `half_mask`. `None` when the pressurized
/// set wraps the whole circumference (no band ordering exists).
fn factor_window(op: &FilmOperator, half_mask: &[bool]) -> Option<WindowFactor> {
    let grid = op.grid();
    let n = grid.n_theta();
    let m = half_rows(grid);
    let cols: Vec<bool> = (0..n)
        .map(|i| half_mask[i * m..(i + 1) * m].iter().any(|&a| a))
        .collect();
    let (start, width) = match longest_inactive_run(&cols) {
        None => (0, 0),
        Some((_, 0)) => return None,
        Some((gap_start, gap_len)) => ((gap_start + gap_len) % n, n - gap_len),
    };
    if width == 0 {
        return Some(WindowFactor {
            start,
            width,
            half_mask: half_mask.to_vec(),
            chol: None,
        });
    }
    let mut band = SymBand::zeros(width * m, m);
    for c in 0..width {
        let i = (start + c) % n;
        let iw = grid.prev(i);
        for jj in 0..m {
            let u = c * m + jj;
            if !half_mask[i * m + jj] {
                band.set(u, 0, 1.0);
                continue;
            }
            // mid-length row is halved so the mirrored system stays symmetric
            let s = if jj + 1 == m { 0.5 } else { 1.0 };
            band.set(u, 0, -s * op.diag[i]);
            if c > 0 && half_mask[iw * m + jj] {
                band.set(u, m, -s * op.west[i]);
            }
            if jj > 0 && half_mask[i * m + jj - 1] {
                band.set(u, 1, -op.axial[i]);
            }
        }
    }
    let chol = band.factor()?;
    Some(WindowFactor {
        start,
        width,
        half_mask: half_mask.to_vec(),
        chol: Some(chol),
    })
}

fn solve_window(factor: &WindowFactor, grid: &Grid, source: &[f64]) -> Vec<f64> {
    let n = grid.n_theta();
    let nz = grid.n_z();
    let m = half_rows(grid);
    let mut p = vec![0.0; grid.len()];
    let Some(chol) = &factor.chol else {
        return p;
    };
    let mut rhs = vec![0.0; factor.width * m];
    for c in 0..factor.width {
        let i = (factor.start + c) % n;
        for jj in 0..m {
            if factor.half_mask[i * m + jj] {
                let s = if jj + 1 == m { 0.5 } else { 1.0 };
                rhs[c * m + jj] = -s * source[grid.idx(i, jj + 1)];
            }
        }
    }
    chol.solve_in_place(&mut rhs);
    for c in 0..factor.width {
        let i = (factor.start + c) % n;
        for jj in 0..m {
            if factor.half_mask[i * m + jj] {
                let v = rhs[c * m + jj];
                p[grid.idx(i, jj + 1)] = v;
                p[grid.idx(i, nz - 2 - jj)] = v;
            }
        }
    }
    p
}

/// Active-set iteration. `Ok(None)` requests the iterative fallback.
fn clamped_direct(
    op: &FilmOperator,
    source: &[f64],
    settings: &SolverSettings,
    hint: Option<&[bool]>,
) -> FilmResult<Option<Clamped>> {
    let grid = *op.grid();
    let m = half_rows(&grid);
    let n = grid.n_theta();
    let scale = source.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return Ok(Some(Clamped {
            p: vec![0.0; grid.len()],
            mask: vec![false; grid.len()],
            factor: factor_window(op, &vec![false; n * m]),
        }));
    }
    let activate_below = -1e-13 * scale;
    let mut half = match hint {
        Some(h) => half_from_full(&grid, h),
        // pressure builds where the source is negative
        None => (0..n * m)
            .map(|q| source[grid.idx(q / m, q % m + 1)] < 0.0)
            .collect(),
    };
    for _ in 0..settings.max_iters {
        let Some(factor) = factor_window(op, &half) else {
            return Ok(None);
        };
        let p = solve_window(&factor, &grid, source);
        let mut next = vec![false; n * m];
        let mut changed = false;
        for i in 0..n {
            for jj in 0..m {
                let q = i * m + jj;
                let j = jj + 1;
                let keep = if half[q] {
                    p[grid.idx(i, j)] > 0.0
                } else {
                    let w = source[grid.idx(i, j)] - op.apply_at(&p, i, j);
                    w < activate_below
                };
                next[q] = keep;
                changed |= keep != half[q];
            }
        }
        if !changed {
            return Ok(Some(Clamped {
                p,
                mask: full_from_half(&grid, &half),
                factor: Some(factor),
            }));
        }
        half = next;
    }
    Err(FilmError::NoConvergence {
        what: "active-set cavitation iteration",
        iterations: settings.max_iters,
        residual: f64::NAN,
    })
}

/// Max-norm defect on `mask`, normalized by the max-norm source on `mask`.
pub(crate) fn masked_residual(op: &FilmOperator, source: &[f64], mask: &[bool], p: &[f64]) -> f64 {
    let grid = op.grid();
    let mut defect = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..grid.n_theta() {
        for j in 1..grid.n_z() - 1 {
            let k = grid.idx(i, j);
            if !mask[k] {
                continue;
            }
            defect = defect.max((op.apply_at(p, i, j) - source[k]).abs());
            scale = scale.max(source[k].abs());
        }
    }
    if scale > 0.0 {
        defect / scale
    } else {
        defect
    }
}

const CHECK_EVERY: usize = 10;

/// Projected (clamp = true) or plain SOR on the full grid.
///
/// With `clamp` the pressurized set is read off the iterate; otherwise nodes
/// outside `fixed_mask` are held at zero.
pub(crate) fn sor(
    op: &FilmOperator,
    source: &[f64],
    settings: &SolverSettings,
    clamp: bool,
    fixed_mask: Option<&[bool]>,
    init: Option<Vec<f64>>,
) -> FilmResult<(Vec<f64>, Vec<bool>, usize, f64)> {
    let grid = *op.grid();
    let nz = grid.n_z();
    let omega = settings.relaxation;
    let mut p = init.unwrap_or_else(|| vec![0.0; grid.len()]);
    let all_interior: Vec<bool> = (0..grid.len())
        .map(|k| {
            let j = k % nz;
            j > 0 && j + 1 < nz
        })
        .collect();
    let update_mask = fixed_mask.unwrap_or(&all_interior);
    let mut last_mask: Option<Vec<bool>> = None;
    let mut residual = f64::INFINITY;
    for sweep in 1..=settings.max_iters {
        for i in 0..grid.n_theta() {
            let d = op.diag[i];
            for j in 1..nz - 1 {
                let k = grid.idx(i, j);
                if !update_mask[k] {
                    continue;
                }
                let off = op.apply_at(&p, i, j) - d * p[k];
                let gs = (source[k] - off) / d;
                let mut v = p[k] + omega * (gs - p[k]);
                if clamp && v < 0.0 {
                    v = 0.0;
                }
                p[k] = v;
            }
        }
        if sweep % CHECK_EVERY == 0 || sweep == settings.max_iters {
            let mask: Vec<bool> = if clamp {
                p.iter().map(|&v| v > 0.0).collect()
            } else {
                update_mask.to_vec()
            };
            residual = masked_residual(op, source, &mask, &p);
            let settled = !clamp || last_mask.as_ref() == Some(&mask);
            if residual <= settings.tol && settled {
                return Ok((p, mask, sweep, residual));
            }
            last_mask = Some(mask);
        }
    }
    Err(FilmError::NoConvergence {
        what: if clamp {
            "projected SOR cavitation sweep"
        } else {
            "SOR perturbation sweep"
        },
        iterations: settings.max_iters,
        residual,
    })
}

pub(crate) fn clamped_solve(
    op: &FilmOperator,
    source: &[f64],
    settings: &SolverSettings,
    hint: Option<&[bool]>,
) -> FilmResult<Clamped> {
    if settings.scheme == CavitationScheme::ActiveSet {
        if let Some(sol) = clamped_direct(op, source, settings, hint)? {
            return Ok(sol);
        }
    }
    let (p, mask, _, _) = sor(op, source, settings, true, None, None)?;
    Ok(Clamped {
        p,
        mask,
        factor: None,
    })
}

/// Linear solve on a fixed pressurized set, zero elsewhere.
pub(crate) fn linear_solve(
    op: &FilmOperator,
    source: &[f64],
    mask: &[bool],
    settings: &SolverSettings,
    factor: Option<&WindowFactor>,
) -> FilmResult<Vec<f64>> {
    let grid = *op.grid();
    if settings.scheme == CavitationScheme::ActiveSet {
        let built;
        let factor = match factor {
            Some(f) => Some(f),
            None => {
                built = factor_window(op, &half_from_full(&grid, mask));
                built.as_ref()
            }
        };
        if let Some(f) = factor {
            return Ok(solve_window(f, &grid, source));
        }
    }
    let (p, _, _, _) = sor(op, source, settings, false, Some(mask), None)?;
    Ok(p)
}
