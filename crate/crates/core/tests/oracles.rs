mod common;

use common::*;
use filmorbit::forces::integrate_force;
use filmorbit::oracles::*;
use filmorbit::reynolds::{solve_film, solve_static};
use filmorbit::{BearingGeometry, DynamicCoefficients, FilmError, Lubricant, OperatingPoint, ShaftState};
use nalgebra::Matrix2;

fn coeffs(st: &ShaftState) -> DynamicCoefficients {
    let sol = solve_film(&geom(), &lub(), &op(), st, &grid(), &settings(), None).unwrap();
    DynamicCoefficients::from_solution(&sol, &grid(), &geom()).unwrap()
}

fn fd_k(st: &ShaftState, delta: f64) -> Matrix2<f64> {
    fd_stiffness(&geom(), &lub(), &op(), st, delta, &grid(), &settings()).unwrap()
}

fn fd_b(st: &ShaftState, vdelta: f64) -> Matrix2<f64> {
    fd_damping(&geom(), &lub(), &op(), st, vdelta, &grid(), &settings()).unwrap()
}

fn assert_entrywise(a: &Matrix2<f64>, b: &Matrix2<f64>, tol: f64, floor: f64, what: &str) {
    for k in 0..4 {
        let (x, y) = (a[k], b[k]);
        let err = (x - y).abs() / y.abs().max(floor);
        assert!(err <= tol, "{what} entry {k}: {x} vs {y} ({err:.2e})");
    }
}

fn assert_matrix_close(a: &Matrix2<f64>, b: &Matrix2<f64>, tol: f64, what: &str) {
    let err = (a - b).amax() / b.amax();
    assert!(err <= tol, "{what}: {a} vs {b} ({err:.2e})");
}

// At e = 0 the radial film force grows like e², so the direct stiffness
// vanishes to first order and its difference quotient is O(δ). Matrices are
// compared against their largest entry there.
#[test]
fn concentric_cross_check() {
    let st = ShaftState::default();
    let c = coeffs(&st);
    assert_eq!(c.f0, filmorbit::ForceVector::zeros());
    assert_matrix_close(&c.k, &fd_k(&st, 1e-3 * C), 0.02, "k");
    assert_matrix_close(&c.b, &fd_b(&st, VELOCITY_STEP), 0.02, "b");
}

#[test]
fn concentric_difference_steps_are_converged() {
    let st = ShaftState::default();
    assert_matrix_close(&fd_k(&st, 0.5e-3 * C), &fd_k(&st, 1e-3 * C), 0.005, "k");
    assert_matrix_close(&fd_b(&st, 0.5 * VELOCITY_STEP), &fd_b(&st, VELOCITY_STEP), 0.005, "b");
}

#[test]
fn difference_steps_are_converged() {
    for st in [at_eps(0.2, 0.0), at_eps(0.3, CHECK_ATTITUDE), at_eps(0.5, 4.0)] {
        let k1 = fd_k(&st, 1e-3 * C);
        let k2 = fd_k(&st, 0.5e-3 * C);
        assert_entrywise(&k2, &k1, 0.005, STIFFNESS_FLOOR, "k step halving");
        let b1 = fd_b(&st, VELOCITY_STEP);
        let b2 = fd_b(&st, 0.5 * VELOCITY_STEP);
        assert_entrywise(&b2, &b1, 0.005, DAMPING_FLOOR, "b step halving");
    }
}

#[test]
fn coefficients_match_difference_oracles() {
    for eps in [0.2, 0.3, 0.5, 0.6] {
        for att in [0.0, CHECK_ATTITUDE, 4.0] {
            let st = at_eps(eps, att);
            let c = coeffs(&st);
            assert_entrywise(&c.k, &fd_k(&st, 1e-3 * C), 0.02, STIFFNESS_FLOOR, "k");
            assert_entrywise(&c.b, &fd_b(&st, VELOCITY_STEP), 0.02, DAMPING_FLOOR, "b");
            let (bxy, byx) = (c.b[(0, 1)], c.b[(1, 0)]);
            assert!((bxy - byx).abs() <= 0.02 * bxy.abs().max(byx.abs()));
        }
    }
}

#[test]
fn stiffness_scales_with_viscosity_and_speed() {
    for eps in [0.2, 0.5] {
        let st = at_eps(eps, 1.0);
        let base = coeffs(&st);
        let g = grid();
        let lub2 = Lubricant::new(2.0 * lub().viscosity).unwrap();
        let op3 = OperatingPoint::new(3.0 * op().omega).unwrap();
        let sol_mu = solve_film(&geom(), &lub2, &op(), &st, &g, &settings(), None).unwrap();
        let sol_w = solve_film(&geom(), &lub(), &op3, &st, &g, &settings(), None).unwrap();
        let c_mu = DynamicCoefficients::from_solution(&sol_mu, &g, &geom()).unwrap();
        let c_w = DynamicCoefficients::from_solution(&sol_w, &g, &geom()).unwrap();
        assert_entrywise(&c_mu.k, &(base.k * 2.0), 1e-9, 0.0, "k(2μ)");
        assert_entrywise(&c_w.k, &(base.k * 3.0), 1e-9, 0.0, "k(3ω)");
        assert_entrywise(&c_mu.b, &(base.b * 2.0), 1e-9, 0.0, "b(2μ)");
        assert_entrywise(&c_w.b, &base.b, 1e-9, 0.0, "b(3ω)");
    }
}

fn slender() -> BearingGeometry {
    BearingGeometry::new(0.055, 0.01375, C).unwrap()
}

#[test]
fn short_bearing_closed_form_properties() {
    let g = slender();
    let tiny = short_bearing_forces(&g, &lub(), &op(), 1e-9).unwrap();
    assert!(tiny.magnitude() < 1e-6);
    let base = short_bearing_forces(&g, &lub(), &op(), 0.4).unwrap();
    let mu2 = short_bearing_forces(&g, &Lubricant::new(0.082).unwrap(), &op(), 0.4).unwrap();
    let w2 = short_bearing_forces(&g, &lub(), &OperatingPoint::new(2.0 * op().omega).unwrap(), 0.4).unwrap();
    for other in [mu2, w2] {
        assert!(rel(other.radial, 2.0 * base.radial) < 1e-12);
        assert!(rel(other.tangential, 2.0 * base.tangential) < 1e-12);
        assert!(rel(other.attitude, base.attitude) < 1e-12);
    }
    // attitude angle of the π film: tan φ = π√(1-ε²)/(4ε)
    let expect = (std::f64::consts::PI * (1.0f64 - 0.16).sqrt() / 1.6).atan();
    assert!(rel(base.attitude, expect) < 1e-12);
}

#[test]
fn short_bearing_domain_errors() {
    for eps in [0.0, 0.9, 1.2, -0.1] {
        assert!(matches!(short_bearing_forces(&slender(), &lub(), &op(), eps), Err(FilmError::Domain(_))));
    }
    assert!(matches!(short_bearing_forces(&geom(), &lub(), &op(), 0.4), Err(FilmError::Domain(_))));
}

#[test]
fn slender_bearing_force_near_closed_form() {
    let g = slender();
    let fine = filmorbit::Grid::new(144, 33, g.length).unwrap();
    let st = ShaftState::from_polar(0.4 * C, 0.7);
    let (p, _) = solve_static(&g, &lub(), &op(), &st, &fine, &settings()).unwrap();
    let f = integrate_force(&p, &fine, &g).unwrap();
    let closed = short_bearing_forces(&g, &lub(), &op(), 0.4).unwrap();
    assert!(rel(f.norm(), closed.magnitude()) < 0.10, "{} vs {}", f.norm(), closed.magnitude());
    // with h = c + x sinθ + y cosθ the thinnest film sits opposite (x, y), so
    // the force leans toward +(x, y), rotated by the attitude angle
    let along = (f.x * st.x + f.y * st.y) / st.eccentricity();
    let across = (f.norm().powi(2) - along * along).sqrt();
    assert!((across.atan2(along) - closed.attitude).abs() < 0.1);
}

#[test]
fn report_uses_floor_denominator() {
    let r = OracleReport::compare("a", 0.5, 1.5, 0.02, 10.0);
    assert_eq!(r.rel_err, 0.1);
    assert!(!r.pass);
    let r = OracleReport::compare("b", 200.0, 202.0, 0.02, 10.0);
    assert!((r.rel_err - 0.01).abs() < 1e-15);
    assert!(r.pass);
    let r = OracleReport::compare("null", 0.0, 0.0, 0.0, 0.0);
    assert!(r.pass);
    let r = OracleReport::compare("null", 0.0, 1e-300, 0.0, 0.0);
    assert!(!r.pass);
    let csv = report_csv(&[OracleReport::compare("x", 1.0, 1.0, 0.02, 0.0)]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(REPORT_HEADER));
    assert_eq!(
        lines.next(),
        Some("x,1.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,2.0000000000000000e-2,true")
    );
}

fn inputs() -> SuiteInputs {
    SuiteInputs {
        geom: geom(),
        lubricant: lub(),
        operating: op(),
        grid: grid(),
        settings: settings(),
    }
}

#[test]
fn healthy_pipeline_passes_the_suite() {
    let i = inputs();
    let reports = validation_suite(&i, &|s| pipeline_coefficients(&i, s)).unwrap();
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(reports.iter().filter(|r| r.quantity.starts_with("null")).all(|r| r.rel_err == 0.0));
}

#[test]
fn sign_tampered_stiffness_fails_the_suite() {
    let i = inputs();
    let tampered = |s: &ShaftState| {
        let mut c = pipeline_coefficients(&i, s)?;
        c.k = -c.k;
        Ok(c)
    };
    let reports = validation_suite(&i, &tampered).unwrap();
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.quantity.as_str()).collect();
    assert_eq!(failed.len(), 12);
    assert!(failed.iter().all(|q| q.contains("_k")));
}
