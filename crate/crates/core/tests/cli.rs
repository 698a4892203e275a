use std::fs;
use std::path::{Path, PathBuf};

use filmorbit::cli::*;
use serde_json::{json, Value};

fn base_config() -> Value {
    json!({
        "bearing": { "r_m": 0.055, "L_m": 0.034, "c_m": 5e-5, "mu_Pa_s": 0.041 },
        "rotor": { "mass_kg": 0.5 },
        "operating": { "omega_rpm": 3000 },
        "load": { "W_N": 1000 },
        "initial": { "x_m": 1e-5, "y_m": -1e-5 },
        "simulation": { "t_end_s": 0.005 }
    })
}

fn write_config(dir: &Path, v: &Value) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn run_cmd(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec![
        "filmorbit".to_string(),
        cmd.to_string(),
        "--config".into(),
        config.display().to_string(),
        "--out".into(),
        out.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    run(args)
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn reference_config_converts_units() {
    let mut v = base_config();
    v["load"]["ripple_percent"] = json!(10);
    let cfg = parse_config(&v.to_string()).unwrap();
    assert!((cfg.operating.omega - 314.159).abs() < 1e-3);
    assert_eq!(cfg.operating.omega, 3000.0 * 2.0 * std::f64::consts::PI / 60.0);
    assert_eq!(cfg.load.ripple, 0.1);
    assert_eq!(cfg.rotor.mass, 0.5);
    assert_eq!(cfg.geom.clearance, 5e-5);
}

fn invalid_field(v: &Value) -> String {
    match parse_config(&v.to_string()) {
        Err(ConfigError::Invalid { field, .. }) => field,
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn config_validation_errors_name_the_field() {
    let mut v = base_config();
    v["bearing"]["c_m"] = json!(0.00055);
    assert_eq!(invalid_field(&v), "bearing");

    let mut v = base_config();
    v["rotor"] = json!({});
    let err = parse_config(&v.to_string()).unwrap_err();
    assert!(err.to_string().contains("mass_kg") && err.to_string().contains("required"));
    v.as_object_mut().unwrap().remove("rotor");
    assert_eq!(invalid_field(&v), "rotor.mass_kg");

    let mut v = base_config();
    v["sweep"] = json!({ "axis": "load", "values": [1000] });
    assert_eq!(invalid_field(&v), "sweep.values");
    v["sweep"]["values"] = json!([1000, 3000, 2000]);
    assert_eq!(invalid_field(&v), "sweep.values");

    let mut v = base_config();
    v["operating"]["omega_rpm"] = json!(-5);
    assert_eq!(invalid_field(&v), "operating.omega_rpm");
}

#[test]
fn unknown_keys_and_syntax_errors_are_rejected() {
    let mut v = base_config();
    v["bearing"]["c_mm"] = json!(0.05);
    assert!(matches!(parse_config(&v.to_string()), Err(ConfigError::Parse { .. })));
    let mut v = base_config();
    v["extra"] = json!(1);
    assert!(matches!(parse_config(&v.to_string()), Err(ConfigError::Parse { .. })));
    let text = "{\n  \"bearing\": {\n    \"r_m\": 0.055,,\n  }\n}";
    match parse_config(text) {
        Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn thread_cap_parsing() {
    assert_eq!(thread_cap(None).unwrap(), None);
    assert_eq!(thread_cap(Some("3")).unwrap(), Some(3));
    assert!(thread_cap(Some("0")).is_err());
    assert!(thread_cap(Some("many")).is_err());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = dir.path().join("nope.json");
    assert_eq!(run_cmd("orbit", &missing, &out, &[]), EXIT_CONFIG);

    let mut v = base_config();
    v["rotor"] = json!({});
    let cfg = write_config(dir.path(), &v);
    assert_eq!(run_cmd("orbit", &cfg, &out, &[]), EXIT_CONFIG);

    let mut v = base_config();
    v["initial"] = json!({ "x_m": 0.0, "y_m": 6e-5 });
    let cfg = write_config(dir.path(), &v);
    assert_eq!(run_cmd("orbit", &cfg, &out, &[]), EXIT_CONTACT);

    let mut v = base_config();
    v["load"]["W_N"] = json!(5e6);
    let cfg = write_config(dir.path(), &v);
    assert_eq!(run_cmd("equilibrium", &cfg, &out, &[]), EXIT_NO_CONVERGENCE);
    assert_eq!(run_cmd("sweep", &cfg, &out, &["--sweep-axis", "load", "--values", "1000,5e6"]), EXIT_NO_CONVERGENCE);
    let (_, rows) = csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 1);

    let cfg = write_config(dir.path(), &base_config());
    assert_eq!(run_cmd("sweep", &cfg, &out, &["--sweep-axis", "sideways", "--values", "1,2"]), EXIT_CONFIG);
    assert_eq!(run_cmd("sweep", &cfg, &out, &[]), EXIT_CONFIG);
    assert_eq!(run(["filmorbit", "--config", cfg.to_str().unwrap()]), EXIT_CONFIG);
    assert_eq!(run(["filmorbit", "bogus"]), EXIT_CONFIG);
    assert_eq!(run_cmd("validate", &cfg, &out, &[]), EXIT_OK);
}

#[test]
fn scenario_selector_runs_without_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base_config();
    v["scenario"] = json!("equilibrium");
    v["out_dir"] = json!(dir.path().join("eq"));
    let cfg = write_config(dir.path(), &v);
    assert_eq!(run(["filmorbit", "--config", cfg.to_str().unwrap()]), EXIT_OK);
    let (header, rows) = csv(&dir.path().join("eq/equilibrium.csv"));
    assert_eq!(header.join(","), COEFFICIENT_HEADER);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 1000.0);
    assert!((rows[0][5] - 1000.0).abs() < 1e-3);
}

#[test]
fn orbit_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &base_config());
    let out = dir.path().join("o");
    assert_eq!(run_cmd("orbit", &cfg, &out, &[]), EXIT_OK);
    let (header, rows) = csv(&out.join("trajectory.csv"));
    assert_eq!(header.join(","), TRAJECTORY_HEADER);
    assert_eq!(rows.len(), 501);
    assert_eq!(&rows[0][..3], &[0.0, 1e-5, -1e-5]);
    for r in &rows {
        assert!((r[5] - r[1].hypot(r[2])).abs() < 1e-20);
        assert!((r[6] - r[5] / 5e-5).abs() < 1e-12);
        assert_eq!((r[9], r[10]), (0.0, 1000.0));
    }
    let (header, rows) = csv(&out.join("coefficients.csv"));
    assert_eq!(header.join(","), COEFFICIENT_HEADER);
    assert_eq!(rows.len(), 1);
    let meta: Value = serde_json::from_str(&fs::read_to_string(out.join("orbit_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["clearance_m"], json!(5e-5));
    assert_eq!(meta["termination"], json!("horizon-reached"));
    assert!(meta["equilibrium_x_m"].as_f64().unwrap() > 0.0);
}

#[test]
fn ripple_flag_reports_loop_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base_config();
    v["initial"] = json!({ "x_m": 5.69e-6, "y_m": 8.21e-7 });
    v["simulation"]["t_end_s"] = json!(0.04);
    let cfg = write_config(dir.path(), &v);
    let out = dir.path().join("r");
    assert_eq!(run_cmd("orbit", &cfg, &out, &["--ripple", "0.10"]), EXIT_OK);
    let meta: Value = serde_json::from_str(&fs::read_to_string(out.join("orbit_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["termination"], json!("horizon-reached"));
    let hi = meta["late_max_distance_m"].as_f64().unwrap();
    let lo = meta["late_min_distance_m"].as_f64().unwrap();
    assert!(lo <= hi && hi < 0.5 * 5e-5);
    let (_, rows) = csv(&out.join("trajectory.csv"));
    assert!(rows.iter().any(|r| r[9] != 0.0));
    assert!(rows.iter().all(|r| (r[9] - 100.0 * (314.1592653589793 * r[0]).sin()).abs() < 1e-6));
}

#[test]
fn sweeps_follow_load_and_speed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &base_config());
    let out = dir.path().join("s");
    assert_eq!(run_cmd("sweep", &cfg, &out, &["--sweep-axis", "load", "--values", "1000,2000,3000,4000"]), EXIT_OK);
    let (header, rows) = csv(&out.join("sweep.csv"));
    assert_eq!(header.join(","), SWEEP_HEADER);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![1000.0, 2000.0, 3000.0, 4000.0]);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    for r in &rows {
        assert!((r[4] - r[0]).abs() < 1e-4 * r[0]);
    }
    assert_eq!(run_cmd("sweep", &cfg, &out, &["--sweep-axis", "speed", "--values", "1000,2000,3000"]), EXIT_OK);
    let (_, rows) = csv(&out.join("sweep.csv"));
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
}

#[test]
fn pressure_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base_config();
    v["pressure"] = json!({ "eps": 0.0, "theta_att_rad": 0.0 });
    let cfg = write_config(dir.path(), &v);
    let out = dir.path().join("p0");
    assert_eq!(run_cmd("pressure", &cfg, &out, &[]), EXIT_OK);
    let (header, rows) = csv(&out.join("pressure.csv"));
    assert_eq!(header.join(","), PRESSURE_HEADER);
    assert_eq!(rows.len(), 72 * 17);
    assert!(rows.iter().all(|r| r[2] == 0.0 && r[7] == 0.0));

    // equilibrium under the configured load
    let cfg = write_config(dir.path(), &base_config());
    let out = dir.path().join("peq");
    assert_eq!(run_cmd("pressure", &cfg, &out, &[]), EXIT_OK);
    let (_, rows) = csv(&out.join("pressure.csv"));
    assert!(rows.iter().map(|r| r[2]).fold(0.0, f64::max) > 0.0);
    for r in &rows {
        assert_eq!(r[7] == 1.0, r[2] > 0.0);
    }
    // the pressurized columns form one contiguous arc
    let cols: Vec<bool> = rows.chunks(17).map(|c| c.iter().any(|r| r[7] == 1.0)).collect();
    let rises = (0..cols.len()).filter(|&i| cols[i] && !cols[(i + cols.len() - 1) % cols.len()]).count();
    assert_eq!(rises, 1);
}

#[test]
fn validate_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &base_config());
    let out = dir.path().join("v");
    assert_eq!(run_cmd("validate", &cfg, &out, &[]), EXIT_OK);
    let text = fs::read_to_string(out.join("oracle_report.csv")).unwrap();
    assert!(text.starts_with("quantity,oracle,pipeline,rel_err,tol,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    let null_rows: Vec<&str> = text.lines().filter(|l| l.starts_with("null")).collect();
    assert_eq!(null_rows.len(), 4);
}

#[test]
fn validate_flags_a_tampered_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(&base_config().to_string()).unwrap();
    let inputs = suite_inputs(&cfg).unwrap();
    let tampered = |s: &filmorbit::ShaftState| {
        let mut c = filmorbit::oracles::pipeline_coefficients(&inputs, s)?;
        c.k[(0, 1)] = -c.k[(0, 1)];
        Ok(c)
    };
    let err = cmd_validate_with(&cfg, dir.path(), &tampered).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_VALIDATION);
    let text = fs::read_to_string(dir.path().join("oracle_report.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(",false")).count(), 3);
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = base_config();
    v["sweep"] = json!({ "axis": "load", "values": [500, 1500, 2500] });
    let cfg = write_config(dir.path(), &v);
    for cmd in ["orbit", "equilibrium", "sweep", "pressure", "validate"] {
        let a = dir.path().join(format!("{cmd}_a"));
        let b = dir.path().join(format!("{cmd}_b"));
        assert_eq!(run_cmd(cmd, &cfg, &a, &[]), EXIT_OK);
        assert_eq!(run_cmd(cmd, &cfg, &b, &[]), EXIT_OK);
        assert_eq!(dir_bytes(&a), dir_bytes(&b), "{cmd}");
    }
}
