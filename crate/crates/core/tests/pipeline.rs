use std::fs;

use hyperbolic_cgc::config::{parse_config, JobConfig};
use hyperbolic_cgc::pipeline::{run_pipeline, Stage};
use hyperbolic_cgc::report::Value;
use num_complex::Complex64;

fn float(r: &hyperbolic_cgc::report::Report, key: &str) -> f64 {
    match r.get(key) {
        Some(Value::Float(v)) => *v,
        other => panic!("{key}: {other:?}"),
    }
}

#[test]
fn umbilic_job_populates_every_gate() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = JobConfig::umbilic(33);
    cfg.out = dir.path().to_path_buf();
    cfg.lambda0 = true;
    let out = run_pipeline(&cfg, Stage::Mesh).unwrap();
    let text = out.report.render();
    assert!(out.report.passed(), "{text}");
    for key in ["gauss.pass", "det.pass", "unitarity_lambda0.pass", "k_spread.pass", "lambda_0.relation.max"] {
        assert!(out.report.get(key).is_some(), "missing {key}");
    }
    assert!(text.contains("family.second_form_deviation = skipped ("));
    for name in ["u.csv", "frame_0.csv", "frame_1.csv", "mesh_0.obj", "mesh_0.csv", "report.txt"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    assert!(!dir.path().join("mesh_1.obj").exists());
    assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap(), text);
}

#[test]
fn three_lambdas_give_three_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = JobConfig::umbilic(33);
    cfg.out = dir.path().to_path_buf();
    cfg.lambdas = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0)];
    let out = run_pipeline(&cfg, Stage::Family).unwrap();
    let meshes = out.files.iter().filter(|p| p.extension().is_some_and(|e| e == "obj")).count();
    assert_eq!(meshes, 3);
    // Q = 0: the second form does not move along the family.
    assert!(float(&out.report, "family.second_form_deviation") < 1e-10);
    assert!(out.report.render().contains("energy = skipped (no lambda0 requested)"));
}

#[test]
fn solve_stage_skips_surface_checks() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "K = -0.75\nN = 33\nr = 0.8\nQ = [[0, 0], [0.1, 0]]\nout = {:?}\n",
        dir.path().display().to_string()
    );
    let cfg = parse_config(&text).unwrap();
    let out = run_pipeline(&cfg, Stage::Solve).unwrap();
    assert!(out.report.passed());
    assert!(out.report.render().contains("det = skipped ("));
    assert!(float(&out.report, "boundary_sensitivity.max") > 0.0);
    assert_eq!(out.files.len(), 2);
}

#[test]
fn gaussmap_on_the_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "K = 3\nN = 33\nrect = [-0.5, 0.5, -0.5, 0.5]\ndomain = \"plane\"\nQ = [[0, 0], [0.1, 0]]\nbc = \"umbilic\"\nout = {:?}\n",
        dir.path().display().to_string()
    );
    let cfg = parse_config(&text).unwrap();
    let out = run_pipeline(&cfg, Stage::GaussMap).unwrap();
    assert!(out.report.passed(), "{}", out.report.render());
    let csv = fs::read_to_string(dir.path().join("gaussmap.csv")).unwrap();
    assert!(csv.starts_with("i,j,x,y,s1,s2,s3\n"));
    assert_eq!(csv.lines().count(), 1 + 33 * 33);
}

#[test]
fn converse_job_logs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "N = 33\nr = 0.8\nQ = [[0, 0]]\nmode = \"converse\"\ntarget = \"H2\"\nlambda1 = [2, 0]\nout = {:?}\n",
        dir.path().display().to_string()
    );
    let cfg = parse_config(&text).unwrap();
    let out = run_pipeline(&cfg, Stage::Converse).unwrap();
    let r = &out.report;
    assert!(r.passed(), "{}", r.render());
    assert!((float(r, "converse.K") + 0.64).abs() < 1e-12);
    assert!((float(r, "converse.lambda0_of_K") - 2.0).abs() < 1e-12);
    assert!(dir.path().join("gaussmap.csv").exists());
}

#[test]
fn cylinder_job_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = JobConfig::cylinder(33);
    cfg.out = dir.path().to_path_buf();
    let out = run_pipeline(&cfg, Stage::Mesh).unwrap();
    assert!(out.report.passed(), "{}", out.report.render());
}

#[test]
fn tight_threshold_fails_with_key() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = JobConfig::umbilic(33);
    cfg.out = dir.path().to_path_buf();
    cfg.tol.k_spread = 1e-300;
    let out = run_pipeline(&cfg, Stage::Mesh).unwrap();
    assert_eq!(out.report.exit_code(), 1);
    assert_eq!(out.report.failures(), ["k_spread"]);
}

#[test]
fn errors_carry_stage_labels() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = JobConfig::umbilic(33);
    cfg.out = dir.path().to_path_buf();
    cfg.bc = hyperbolic_cgc::config::BcMode::File(dir.path().join("missing.csv"));
    let err = run_pipeline(&cfg, Stage::Solve).unwrap_err().to_string();
    assert!(err.starts_with("gauss_solver: "), "{err}");
    assert!(run_pipeline(&JobConfig { n: 64, ..cfg.clone() }, Stage::Solve).unwrap_err().to_string().starts_with("cli_io: "));
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = JobConfig::umbilic(17);
    cfg.lambda0 = true;
    cfg.out = a.path().to_path_buf();
    let fa = run_pipeline(&cfg, Stage::GaussMap).unwrap().files;
    cfg.out = b.path().to_path_buf();
    run_pipeline(&cfg, Stage::GaussMap).unwrap();
    for f in fa {
        let name = f.file_name().unwrap();
        assert_eq!(fs::read(&f).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name:?}");
    }
}

#[test]
fn converse_from_solved_seed() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "N = 33\nr = 0.8\nQ = [[0, 0], [0.1, 0]]\nmode = \"converse\"\ntarget = \"S2\"\nlambda1 = [0, 3]\nout = {:?}\n",
        dir.path().display().to_string()
    );
    let cfg = parse_config(&text).unwrap();
    let out = run_pipeline(&cfg, Stage::Converse).unwrap();
    let r = &out.report;
    assert!(r.passed(), "{}", r.render());
    assert!(float(r, "converse.K") > 0.0);
    assert!(float(r, "converse.round_trip_error") < 1e-12);
}
