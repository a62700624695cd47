//! Job orchestration: solve, integrate, build surfaces and write artifacts.
//!
//! Stages are cumulative. `Solve` writes `u.csv`; `Frame` adds
//! `frame_<k>.csv` per spectral parameter; `Mesh` and `Family` add
//! `mesh_<k>.obj` (and `.ply`) with a `mesh_<k>.csv` sidecar for every
//! parameter except `lambda0`; `GaussMap`
//! adds `gaussmap.csv` at `lambda0 e^{i theta}`. `Converse` builds the data
//! from a harmonic seed and then runs everything. Every run ends with
//! `report.txt`.
//!
//! Only four thresholds gate the exit status: the Gauss residual, the
//! determinant drift, unitarity at `lambda0` and the curvature spread.
//! Everything else is reported as a diagnostic.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::config::{BcMode, JobConfig, Mode};
use crate::error::{Error, Result};
use crate::export::{mesh, read_u_csv, write_frame_csv, write_gaussmap_csv, write_mesh_sidecar, write_u_csv};
use crate::frame::{frame_unitarity_residual, integrate_frame, FrameField};
use crate::gauss::{gauss_residual, ode_oracle, solve_gauss, spherical_seed, BoundaryData, MetricField};
use crate::gauss_maps::{
    converse_rescale, energy_check, harmonicity_residual, lagrangian_map, lambda0, HarmonicSeed,
};
use crate::grid::{Grid, GridField};
use crate::lax::{build_uv, zero_curvature_residual, DerivativeField, RealForm};
use crate::quadratic::QDiff;
use crate::report::Report;
use crate::surface::{
    build_surface, curvature, diag_norm, form_distance, fundamental_forms_numeric, klotz_recover,
    mean_curvature_closed, mean_curvature_half, NumericForms,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Solve,
    Frame,
    Mesh,
    Family,
    GaussMap,
    Converse,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Solve => "solve",
            Stage::Frame => "frame",
            Stage::Mesh => "mesh",
            Stage::Family => "family",
            Stage::GaussMap => "gaussmap",
            Stage::Converse => "converse",
        }
    }
}

#[derive(Debug)]
pub struct PipelineOutput {
    pub report: Report,
    /// Files written, in order; the report comes last.
    pub files: Vec<PathBuf>,
}

/// One spectral parameter of the job.
struct Sample {
    label: String,
    lambda: Complex64,
    at_lambda0: bool,
}

struct Run<'a> {
    cfg: &'a JobConfig,
    stage: Stage,
    report: Report,
    files: Vec<PathBuf>,
}

impl Run<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn wrote(&mut self, p: PathBuf) {
        self.files.push(p);
    }
}

/// Runs the job up to `stage` and writes its artifacts under `cfg.out`.
pub fn run_pipeline(cfg: &JobConfig, stage: Stage) -> Result<PipelineOutput> {
    cfg.validate().map_err(|e| e.in_stage("cli_io"))?;
    if stage == Stage::Converse && cfg.mode == Mode::Direct {
        return Err(Error::validation("mode", "the converse stage needs mode = \"converse\""));
    }
    std::fs::create_dir_all(&cfg.out)?;
    let mut run = Run { cfg, stage, report: Report::new(), files: Vec::new() };
    let grid = cfg.grid()?;
    describe(&mut run.report, cfg, &grid, stage);

    let (u, q) = metric(&mut run, &grid).map_err(|e| e.in_stage("gauss_solver"))?;
    let p = run.path("u.csv");
    write_u_csv(&u, &p)?;
    run.wrote(p);

    if stage >= Stage::Frame {
        surfaces(&mut run, &u, &q)?;
    } else {
        for key in ["zero_curvature", "det", "unitarity_lambda0", "k_spread", "relation", "klotz_dbar"] {
            run.report.skipped(key, format!("stage {} stops after the solve", stage.name()));
        }
    }

    let p = run.path("report.txt");
    run.report.write(&p)?;
    run.wrote(p);
    Ok(PipelineOutput { report: run.report, files: run.files })
}

fn describe(r: &mut Report, cfg: &JobConfig, g: &Grid, stage: Stage) {
    r.text("job.stage", stage.name());
    r.float("job.K", cfg.k);
    r.text(
        "job.Q",
        cfg.q.coeffs().iter().map(|c| format!("[{:.16e},{:.16e}]", c.re, c.im)).collect::<Vec<_>>().join(","),
    );
    r.int("grid.nx", g.nx() as i64);
    r.int("grid.ny", g.ny() as i64);
    r.float("grid.h", g.h());
    r.float("grid.x_min", g.x_min());
    r.float("grid.x_max", g.x_max());
    r.float("grid.y_min", g.y_min());
    r.float("grid.y_max", g.y_max());
}

fn boundary(cfg: &JobConfig, g: &Grid) -> Result<BoundaryData> {
    match &cfg.bc {
        BcMode::Umbilic if cfg.k > 0.0 => Ok(BoundaryData::from_field(spherical_seed(cfg.k, g)?.field().clone())),
        BcMode::Umbilic => BoundaryData::umbilic(cfg.k, g),
        BcMode::Heuristic => BoundaryData::heuristic(&cfg.q, cfg.k, g),
        BcMode::File(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(BoundaryData::from_field(read_u_csv(&text, g)?))
        }
        BcMode::Oracle => {
            let c = cfg.q.coeffs()[0].norm();
            let (half, mid) = ((g.x_max() - g.x_min()) / 2.0, (g.x_max() + g.x_min()) / 2.0);
            let end = c.ln() + 0.5;
            let profile = ode_oracle(c, cfg.k, half, (end, end), g.nx(), 64)?;
            let trace = BoundaryData::from_fn(g, |z| profile.at(z.re - mid));
            let start = GridField::from_fn(*g, |i, j, _| {
                if g.is_boundary(i, j) {
                    trace.values().get(i, j)
                } else {
                    end
                }
            });
            Ok(BoundaryData::from_field(start))
        }
    }
}

/// The metric and differential the surfaces are built from.
fn metric(run: &mut Run, g: &Grid) -> Result<(MetricField, QDiff)> {
    let cfg = run.cfg;
    let r = &mut run.report;
    if let Mode::Converse { target, lambda1 } = cfg.mode {
        let closed_form = cfg.q.is_zero();
        let seed = if closed_form {
            HarmonicSeed::umbilic(g, target, cfg.q.domain())?
        } else {
            let (seed, stats) = HarmonicSeed::solve(cfg.q.clone(), g, target)?;
            r.int("converse.seed_newton_iterations", stats.newton_iterations() as i64);
            seed
        };
        r.norm("converse.seed_residual", diag_norm(&seed.residual()));
        if let Some((i, j)) = seed.conformal_node() {
            r.text("converse.warning", format!("seed is not conformal at node ({i}, {j})"));
        }
        let data = converse_rescale(&seed, lambda1)?;
        let back = lambda0(data.k)?;
        r.float("converse.lambda1_modulus", lambda1.norm());
        r.float("converse.factor", data.factor);
        r.float("converse.K", data.k);
        r.float("converse.lambda0_of_K", back);
        r.float("converse.round_trip_error", data.roundtrip_error);
        r.skipped("boundary_sensitivity", "converse data comes from a seed");
        let res = diag_norm(&gauss_residual(&data.u, &data.q));
        if closed_form {
            // The discrete equation is only satisfied up to truncation error.
            r.norm("gauss_truncation", res);
            r.skipped("gauss", "closed-form seed, no discrete solve");
        } else {
            r.check_max("gauss", res.max, cfg.tol.gauss);
        }
        return Ok((data.u, data.q));
    }

    let bc = boundary(cfg, g)?;
    let (u, stats) = solve_gauss(&cfg.q, cfg.k, g, &bc)?;
    r.int("solve.newton_iterations", stats.newton_iterations() as i64);
    r.int("solve.linear_iterations", stats.linear_iterations.iter().sum::<usize>() as i64);
    let res = gauss_residual(&u, &cfg.q);
    r.norm("gauss", diag_norm(&res));
    r.check_max("gauss", stats.final_residual.max, cfg.tol.gauss);
    if matches!(cfg.bc, BcMode::Heuristic) {
        let (moved, _) = solve_gauss(&cfg.q, cfg.k, g, &bc.perturbed(1e-3))?;
        let shift = GridField::from_fn(*g, |i, j, _| moved.u(i, j) - u.u(i, j));
        r.float("boundary_sensitivity.delta", 1e-3);
        r.norm("boundary_sensitivity", diag_norm(&shift));
    } else {
        r.skipped("boundary_sensitivity", "boundary data is not heuristic");
    }
    Ok((u, cfg.q.clone()))
}

fn samples(run: &Run, k: f64) -> Result<Vec<Sample>> {
    let cfg = run.cfg;
    let mut lambdas = cfg.surface_lambdas();
    if run.stage == Stage::Family && lambdas.len() < 2 {
        lambdas = default_family();
    }
    let mut out: Vec<Sample> = lambdas
        .into_iter()
        .map(|l| Sample { label: format!("[{:.16e},{:.16e}]", l.re, l.im), lambda: l, at_lambda0: false })
        .collect();
    let wants_l0 = cfg.lambda0 || run.stage >= Stage::GaussMap;
    if wants_l0 {
        let l = Complex64::from_polar(lambda0(k)?, cfg.theta);
        out.push(Sample { label: "lambda0".into(), lambda: l, at_lambda0: true });
    }
    Ok(out)
}

fn surfaces(run: &mut Run, u: &MetricField, q: &QDiff) -> Result<()> {
    let cfg = run.cfg;
    let g = *u.grid();
    let du = DerivativeField::from_metric(u);
    let list = samples(run, u.k()).map_err(|e| e.in_stage("gauss_maps"))?;
    let form = if u.k() < 0.0 { RealForm::Su11 } else { RealForm::Su2 };
    let with_mesh = run.stage >= Stage::Mesh;

    let mut det: f64 = 0.0;
    let mut spread: f64 = 0.0;
    let mut second: Vec<GridField<NumericForms>> = Vec::new();
    let mut l0_frame: Option<FrameField> = None;
    for (k, s) in list.iter().enumerate() {
        let key = format!("lambda_{k}");
        run.report.text(format!("{key}.value"), s.label.clone());
        let mc = build_uv(u, &du, q, s.lambda).map_err(|e| e.in_stage("lax_frame"))?;
        run.report.norm(&format!("{key}.zero_curvature"), diag_norm(&zero_curvature_residual(&mc)));
        let h = harmonicity_residual(&mc);
        run.report.norm(&format!("{key}.harmonicity"), diag_norm(&h.two_form));
        let psi = integrate_frame(&mc);
        det = det.max(psi.det_residual());
        run.report.float(format!("{key}.max_step_drift"), psi.max_step_drift());
        for (w, msg) in psi.warnings().iter().enumerate() {
            run.report.text(format!("{key}.warning_{w}"), msg.clone());
        }
        let p = run.path(&format!("frame_{k}.csv"));
        write_frame_csv(&psi, &p)?;
        run.wrote(p);

        // The lambda0 member feeds the Gauss map; for K > 0 its frame is
        // unitary and f = Psi Psi^* collapses to a point.
        if with_mesh && s.at_lambda0 {
            run.report.skipped(format!("{key}.surface"), "lambda0 frame is used for the Gauss map only");
        } else if with_mesh {
            let surf = build_surface(&psi).map_err(|e| e.in_stage("surface_builder"))?;
            let forms = fundamental_forms_numeric(&surf);
            let kn = curvature(&forms).map_err(|e| e.in_stage("surface_builder"))?;
            let vals: Vec<f64> = g.diagnostic_nodes().map(|(i, j)| kn.get(i, j)).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64).sqrt();
            spread = spread.max(sd / u.k().abs());
            run.report.float(format!("{key}.K_mean"), mean);
            run.report.float(format!("{key}.K_stddev_over_K"), sd / u.k().abs());
            let rel = GridField::from_fn(g, |i, j, z| {
                let h = mean_curvature_closed(u.u(i, j), q.value(z), u.sigma());
                forms.get(i, j).relation_residual(h, u.k())
            });
            run.report.norm(&format!("{key}.relation"), diag_norm(&rel));
            let (_, dbar) = klotz_recover(&forms);
            run.report.norm(&format!("{key}.klotz_dbar"), diag_norm(&dbar));
            let m = mesh(&surf).map_err(|e| e.in_stage("surface_builder"))?;
            let p = run.path(&format!("mesh_{k}.obj"));
            m.write_obj(&p)?;
            run.wrote(p);
            if cfg.ply {
                let p = run.path(&format!("mesh_{k}.ply"));
                m.write_ply(&p)?;
                run.wrote(p);
            }
            let p = run.path(&format!("mesh_{k}.csv"));
            write_mesh_sidecar(&forms, &p)?;
            run.wrote(p);
            second.push(forms);
        }
        if s.at_lambda0 {
            run.report.check_max(
                "unitarity_lambda0",
                frame_unitarity_residual(&psi, form),
                cfg.tol.unitarity,
            );
            l0_frame = Some(psi);
        }
    }
    run.report.check_max("det", det, cfg.tol.det);
    if l0_frame.is_none() {
        run.report.skipped("unitarity_lambda0", "no lambda0 requested");
    }

    if with_mesh {
        run.report.check_max("k_spread", spread, cfg.tol.k_spread);
        let (i0, j0) = g.base_point();
        let z0 = g.z(i0, j0);
        run.report.float("mean_curvature.base", mean_curvature_closed(u.u(i0, j0), q.value(z0), u.sigma()));
        run.report.float("mean_curvature.half_variant", mean_curvature_half(u.u(i0, j0), q.value(z0), u.sigma()));
    } else {
        run.report.skipped("k_spread", "no surfaces at stage frame");
    }

    if second.len() >= 2 && run.stage >= Stage::Family {
        let base = &second[0];
        let dev = second[1..]
            .iter()
            .map(|f| {
                diag_norm(&GridField::from_fn(g, |i, j, _| {
                    form_distance(&f.get(i, j).second, &base.get(i, j).second)
                }))
                .max
            })
            .fold(0.0, f64::max);
        run.report.float("family.second_form_deviation", dev);
    } else {
        run.report.skipped("family.second_form_deviation", "needs stage family and at least two lambdas");
    }

    match &l0_frame {
        Some(psi) => {
            let map = lagrangian_map(psi).map_err(|e| e.in_stage("gauss_maps"))?;
            let e = energy_check(&map, u, q, cfg.theta).map_err(|e| e.in_stage("gauss_maps"))?;
            run.report.norm("energy.hopf", diag_norm(&e.hopf));
            run.report.norm("energy.dirichlet", diag_norm(&e.dirichlet));
            run.report.float("energy.min_conformality_ratio", e.min_conformality_ratio);
            run.report.float("gaussmap.orbit_residual", map.orbit_residual());
            if run.stage >= Stage::GaussMap {
                let p = run.path("gaussmap.csv");
                write_gaussmap_csv(&map, &p).map_err(|e| e.in_stage("gauss_maps"))?;
                run.wrote(p);
            }
        }
        None => run.report.skipped("energy", "no lambda0 requested"),
    }
    Ok(())
}

/// `e^{i pi k / 4}` for `k = 0..8`, used when `family` gets fewer than two
/// spectral parameters.
pub fn default_family() -> Vec<Complex64> {
    (0..8).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 4.0)).collect()
}

/// Reads a config file. A relative `bc_file` is taken relative to the file.
pub fn load_config(path: &Path) -> Result<JobConfig> {
    let text = std::fs::read_to_string(path)?;
    let mut cfg = crate::config::parse_config(&text)?;
    if let BcMode::File(p) = &cfg.bc {
        if p.is_relative() {
            let dir = path.parent().unwrap_or(Path::new(""));
            cfg.bc = BcMode::File(dir.join(p));
        }
    }
    Ok(cfg)
}
