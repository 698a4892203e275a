//! Fixed-format CSV writers. Every number is printed with 17 significant
//! digits so reruns of the same config give byte-identical files.

use std::fmt::Write as _;

use crate::bearing::{to_polar, BearingGeometry, OperatingPoint, ShaftState};
use crate::dynamics::Trajectory;
use crate::forces::DynamicCoefficients;
use crate::reynolds::{Grid, PressureSolution};

pub const TRAJECTORY_HEADER: &str = "t_s,x_m,y_m,vx_mps,vy_mps,e_m,eps,fx_N,fy_N,Wx_N,Wy_N";
pub const COEFFICIENT_HEADER: &str =
    "W_N,omega_rpm,eps,theta_att_rad,fx,fy,kxx,kxy,kyx,kyy,bxx,bxy,byx,byy";
pub const SWEEP_HEADER: &str = "axis_value,eps,theta_att,fx,fy,kxx,kxy,kyx,kyy,bxx,bxy,byx,byy";
pub const PRESSURE_HEADER: &str = "theta_rad,z_m,p0_Pa,px,py,pvx,pvy,active";

/// 17 significant digits; negative zero is printed as zero.
pub fn num(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

fn row(out: &mut String, values: &[f64]) {
    let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn coefficient_cells(c: &DynamicCoefficients) -> [f64; 10] {
    [
        c.f0.x,
        c.f0.y,
        c.k[(0, 0)],
        c.k[(0, 1)],
        c.k[(1, 0)],
        c.k[(1, 1)],
        c.b[(0, 0)],
        c.b[(0, 1)],
        c.b[(1, 0)],
        c.b[(1, 1)],
    ]
}

pub fn trajectory_csv(traj: &Trajectory, geom: &BearingGeometry) -> String {
    let mut out = format!("{TRAJECTORY_HEADER}\n");
    for s in &traj.samples {
        let st = s.state;
        let e = st.eccentricity();
        row(
            &mut out,
            &[
                s.t,
                st.x,
                st.y,
                st.vx,
                st.vy,
                e,
                e / geom.clearance,
                s.film_force.x,
                s.film_force.y,
                s.load.x,
                s.load.y,
            ],
        );
    }
    out
}

/// One coefficient row for the shaft at `state` under load magnitude `w`.
pub fn coefficient_row(
    w: f64,
    op: &OperatingPoint,
    state: &ShaftState,
    geom: &BearingGeometry,
    c: &DynamicCoefficients,
) -> String {
    let (e, att) = to_polar(state);
    let mut vals = vec![w, op.rpm(), e / geom.clearance, att];
    vals.extend_from_slice(&coefficient_cells(c));
    let mut out = String::new();
    row(&mut out, &vals);
    out
}

pub fn coefficient_csv(rows: &[String]) -> String {
    let mut out = format!("{COEFFICIENT_HEADER}\n");
    for r in rows {
        out.push_str(r);
    }
    out
}

pub struct SweepRow {
    pub axis_value: f64,
    pub state: ShaftState,
    pub coefficients: DynamicCoefficients,
}

pub fn sweep_csv(rows: &[SweepRow], geom: &BearingGeometry) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let (e, att) = to_polar(&r.state);
        let mut vals = vec![r.axis_value, e / geom.clearance, att];
        vals.extend_from_slice(&coefficient_cells(&r.coefficients));
        row(&mut out, &vals);
    }
    out
}

/// One row per node, θ-major then z.
pub fn pressure_csv(sol: &PressureSolution, grid: &Grid) -> String {
    let mut out = format!("{PRESSURE_HEADER}\n");
    let p = &sol.perturbations;
    for i in 0..grid.n_theta() {
        for j in 0..grid.n_z() {
            let k = (i, j);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                num(grid.theta(i)),
                num(grid.z(j)),
                num(sol.p0[k]),
                num(p.px[k]),
                num(p.py[k]),
                num(p.pvx[k]),
                num(p.pvy[k]),
                u8::from(sol.active.mask[grid.idx(i, j)])
            );
        }
    }
    out
}
