//! The built-in acceptance suite: fourteen numbered checks on fixed
//! fixtures, each producing a block of report keys and a pass flag.
//!
//! Convergence is judged on grids with 33, 65 and 129 nodes per side. Rates
//! are read off the core nodes (see [`crate::grid::CORE_FRACTION`]); the
//! reported `max`/`rms` values cover every diagnostic node.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::rc::Rc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::frame::{frame_unitarity_residual, integrate_frame, integrate_frame_columns_first, FrameField};
use crate::gauss::{
    gauss_residual, ode_oracle, solve_gauss, spherical_seed, umbilic_seed, BoundaryData, MetricField,
};
use crate::gauss_maps::{
    converse_connection_residual, converse_curvature, converse_rescale, energy_check,
    harmonicity_residual, lagrangian_map, lambda0, HarmonicSeed, SeedTarget,
};
use crate::grid::{Grid, GridField};
use crate::lax::{
    build_uv, build_uv_general, compute_p, reality_residual, zero_curvature_residual,
    DerivativeField, MaurerCartanData, RealForm,
};
use crate::minkowski::{mink_inner, HermMatrix, BASIS};
use crate::quadratic::{QDiff, QDomain};
use crate::report::Report;
use crate::surface::{
    build_surface, core_norm, curvature, diag_norm, form_distance, fundamental_forms_numeric,
    klotz_recover, mean_curvature, mean_curvature_closed, mean_curvature_half, ray_length,
    weak_coefficient, weak_metric_numeric, NumericForms, RayDirection, RealForm2, SurfaceData,
};
use crate::tolerances as tol;

/// Grid sizes of the refinement study.
pub const LEVELS: [usize; 3] = [33, 65, 129];

const UNBOUNDED: (f64, f64) = (tol::RATE_MIN, f64::INFINITY);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FixtureKind {
    /// `K = -3/4`, `Q = 0` on the square inscribed in `|z| = 0.8`; exact.
    Umbilic,
    /// `K = -3/4`, `Q = z/10` on the same square; solved with the heuristic
    /// boundary data.
    LinearQ,
    /// `K = 3`, `Q = 0` on `[-1/2, 1/2]^2`; exact.
    Sphere,
    /// `K = 3`, `Q = z/10` on `[-1/2, 1/2]^2`; solved with the spherical trace.
    SphereLinearQ,
}

impl FixtureKind {
    pub fn name(self) -> &'static str {
        match self {
            FixtureKind::Umbilic => "umbilic",
            FixtureKind::LinearQ => "linear_q",
            FixtureKind::Sphere => "sphere",
            FixtureKind::SphereLinearQ => "sphere_linear_q",
        }
    }
}

/// A solution together with its frame and surface at `lambda = 1`.
#[derive(Debug)]
pub struct Fixture {
    pub u: MetricField,
    pub q: QDiff,
    pub du: DerivativeField,
    pub mc: MaurerCartanData,
    pub psi: FrameField,
    pub surface: SurfaceData,
    pub forms: GridField<NumericForms>,
}

impl Fixture {
    pub fn build(kind: FixtureKind, n: usize) -> Result<Self> {
        let tenth = QDiff::monomial(c(0.1, 0.0), 1, QDomain::UnitDisk);
        let (u, q) = match kind {
            FixtureKind::Umbilic => {
                let g = Grid::inscribed(0.8, n)?;
                (umbilic_seed(-0.75, &g)?, QDiff::zero(QDomain::UnitDisk))
            }
            FixtureKind::LinearQ => {
                let g = Grid::inscribed(0.8, n)?;
                let bc = BoundaryData::heuristic(&tenth, -0.75, &g)?;
                (solve_gauss(&tenth, -0.75, &g, &bc)?.0, tenth)
            }
            FixtureKind::Sphere => {
                let g = Grid::centered_square(0.5, n)?;
                (spherical_seed(3.0, &g)?, QDiff::zero(QDomain::Plane))
            }
            FixtureKind::SphereLinearQ => {
                let g = Grid::centered_square(0.5, n)?;
                let q = QDiff::new(tenth.coeffs().to_vec(), QDomain::Plane);
                let bc = BoundaryData::from_field(spherical_seed(3.0, &g)?.field().clone());
                (solve_gauss(&q, 3.0, &g, &bc)?.0, q)
            }
        };
        Self::from_solution(u, q)
    }

    pub fn from_solution(u: MetricField, q: QDiff) -> Result<Self> {
        let du = DerivativeField::from_metric(&u);
        let mc = build_uv(&u, &du, &q, c(1.0, 0.0))?;
        let psi = integrate_frame(&mc);
        let surface = build_surface(&psi)?;
        let forms = fundamental_forms_numeric(&surface);
        Ok(Self { u, q, du, mc, psi, surface, forms })
    }

    pub fn grid(&self) -> Grid {
        *self.u.grid()
    }

    pub fn k(&self) -> f64 {
        self.u.k()
    }

    /// The surface at another spectral parameter.
    pub fn surface_at(&self, lambda: Complex64) -> Result<(FrameField, SurfaceData)> {
        let mc = build_uv(&self.u, &self.du, &self.q, lambda)?;
        let psi = integrate_frame(&mc);
        let s = build_surface(&psi)?;
        Ok((psi, s))
    }
}

/// Fixtures built on first use and shared between checks.
#[derive(Default)]
pub struct Fixtures {
    cache: RefCell<BTreeMap<(FixtureKind, usize), Rc<Fixture>>>,
}

impl Fixtures {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, kind: FixtureKind, n: usize) -> Result<Rc<Fixture>> {
        if let Some(f) = self.cache.borrow().get(&(kind, n)) {
            return Ok(f.clone());
        }
        let f = Rc::new(Fixture::build(kind, n)?);
        self.cache.borrow_mut().insert((kind, n), f.clone());
        Ok(f)
    }

    /// `metric(fixture)` at every refinement level.
    fn series(&self, kind: FixtureKind, mut metric: impl FnMut(&Fixture) -> Result<f64>) -> Result<Vec<(usize, f64)>> {
        LEVELS.iter().map(|&n| Ok((n, metric(&*self.get(kind, n)?)?))).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub report: Report,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }

    /// `PASS 07 curvature_constancy` or `FAIL ...` with the failed keys.
    pub fn line(&self) -> String {
        if self.passed() {
            format!("PASS {:02} {}", self.id, self.name)
        } else {
            format!("FAIL {:02} {} [{}]", self.id, self.name, self.report.failures().join(", "))
        }
    }
}

pub const CRITERIA: [(usize, &str); 14] = [
    (1, "minkowski_model"),
    (2, "pde_order"),
    (3, "oracle_equivalence"),
    (4, "flatness"),
    (5, "frame_integrity"),
    (6, "reality_at_lambda0"),
    (7, "curvature_constancy"),
    (8, "klotz_holomorphic"),
    (9, "associated_family"),
    (10, "fundamental_form_relation"),
    (11, "energy_formulas"),
    (12, "converse_round_trip"),
    (13, "harmonicity"),
    (14, "weak_metric"),
];

/// Runs one numbered check.
pub fn run_criterion(id: usize, fx: &Fixtures) -> CriterionResult {
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, n)| *n).unwrap_or("unknown");
    let mut r = Report::new();
    let outcome = match id {
        1 => minkowski_model(&mut r),
        2 => pde_order(&mut r),
        3 => oracle_equivalence(&mut r),
        4 => flatness(&mut r, fx),
        5 => frame_integrity(&mut r, fx),
        6 => reality(&mut r, fx),
        7 => curvature_constancy(&mut r, fx),
        8 => klotz(&mut r, fx),
        9 => associated_family(&mut r, fx),
        10 => form_relation(&mut r, fx),
        11 => energy(&mut r, fx),
        12 => converse(&mut r),
        13 => harmonicity(&mut r, fx),
        14 => weak_metric(&mut r, fx),
        _ => {
            r.text("error", format!("no criterion {id}"));
            r.outcome("error", false);
            Ok(())
        }
    };
    if let Err(e) = outcome {
        r.text("error", e.to_string());
        r.outcome("error", false);
    }
    CriterionResult { id, name, report: r }
}

/// All checks in order.
pub fn run_all() -> Vec<CriterionResult> {
    let fx = Fixtures::new();
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, &fx)).collect()
}

/// One report with every criterion under `cNN_name.` and its pass flag.
pub fn verify_report(results: &[CriterionResult]) -> Report {
    let mut out = Report::new();
    out.text("suite.levels", LEVELS.map(|n| n.to_string()).join(","));
    for res in results {
        let prefix = format!("c{:02}_{}", res.id, res.name);
        out.merge(&prefix, res.report.clone());
        out.push(format!("{prefix}.passed"), crate::report::Value::Bool(res.passed()));
    }
    out
}

fn minkowski_model(r: &mut Report) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c9c0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let a = HermMatrix::new(
            scale * rng.gen_range(-1.0..1.0),
            scale * rng.gen_range(-1.0..1.0),
            c(scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0)),
        );
        let norm2 = a.to_c2x2().frobenius().powi(2);
        worst = worst.max((mink_inner(&a, &a) + a.det()).abs() / (1.0 + norm2));
    }
    r.int("samples", 1000);
    r.check_max("quadratic_form_vs_det", worst, tol::MINKOWSKI_REL);
    let basis = [BASIS.e0, BASIS.e1, BASIS.e2, BASIS.e3];
    let mut exact = true;
    for (a, ea) in basis.iter().enumerate() {
        for (b, eb) in basis.iter().enumerate() {
            let expected = if a != b { 0.0 } else if a == 0 { -1.0 } else { 1.0 };
            let got = mink_inner(&HermMatrix::from_c2x2(ea), &HermMatrix::from_c2x2(eb));
            exact &= got == expected;
        }
    }
    r.outcome("basis_orthonormal_exact", exact);
    Ok(())
}

fn pde_order(r: &mut Report) -> Result<()> {
    let q = QDiff::zero(QDomain::UnitDisk);
    let mut errs = Vec::new();
    for n in LEVELS {
        let g = Grid::inscribed(0.8, n)?;
        let seed = umbilic_seed(-0.75, &g)?;
        let (u, stats) = solve_gauss(&q, -0.75, &g, &BoundaryData::umbilic(-0.75, &g)?)?;
        let err = g.nodes().map(|(i, j)| (u.u(i, j) - seed.u(i, j)).abs()).fold(0.0, f64::max);
        errs.push((n, err));
        r.int(format!("newton_iterations.n{n}"), stats.newton_iterations() as i64);
        r.check_max(&format!("gauss_residual.n{n}"), diag_norm(&gauss_residual(&u, &q)).max, tol::GAUSS);
    }
    r.check_refinement("error_vs_seed", &errs, tol::RATE_RANGE);
    r.check_max("error_vs_seed.final", errs[errs.len() - 1].1, tol::PDE_FINAL);

    // Not a criterion: how far the Q = z/10 solution moves when its boundary
    // data is raised by 1e-3.
    let g = Grid::inscribed(0.8, 65)?;
    let q = QDiff::monomial(c(0.1, 0.0), 1, QDomain::UnitDisk);
    let bc = BoundaryData::heuristic(&q, -0.75, &g)?;
    let (a, _) = solve_gauss(&q, -0.75, &g, &bc)?;
    let (b, _) = solve_gauss(&q, -0.75, &g, &bc.perturbed(1e-3))?;
    let shift = GridField::from_fn(g, |i, j, _| b.u(i, j) - a.u(i, j));
    r.float("boundary_sensitivity.delta", 1e-3);
    r.float("boundary_sensitivity.center", shift.get(g.base_point().0, g.base_point().1));
    r.norm("boundary_sensitivity", diag_norm(&shift));
    Ok(())
}

fn oracle_equivalence(r: &mut Report) -> Result<()> {
    let (nx, ny, half, k) = (257, 65, 0.5, -0.75);
    let g = Grid::strip(half, nx, ny)?;
    let ends = (0.5, 0.5);
    let profile = ode_oracle(1.0, k, half, ends, nx, 64)?;
    let trace = BoundaryData::from_fn(&g, |z| profile.at(z.re));
    let start = GridField::from_fn(g, |i, j, _| {
        if g.is_boundary(i, j) {
            trace.values().get(i, j)
        } else {
            ends.0
        }
    });
    let q = QDiff::constant(c(1.0, 0.0), QDomain::Plane);
    let (u, _) = solve_gauss(&q, k, &g, &BoundaryData::from_field(start))?;
    let err = g.nodes().map(|(i, j)| (u.u(i, j) - profile.u[i]).abs()).fold(0.0, f64::max);
    r.text("grid", format!("{nx}x{ny}"));
    r.float("shooting_mismatch", profile.mismatch);
    r.check_max("strip_vs_profile", err, tol::ORACLE);
    Ok(())
}

/// `Q = conj(z)` on the umbilic seed, with the matching `p`; not flat and not
/// harmonic.
fn antiholomorphic_control(n: usize) -> Result<MaurerCartanData> {
    let g = Grid::inscribed(0.8, n)?;
    let u = umbilic_seed(-0.75, &g)?;
    let du = DerivativeField::from_metric(&u);
    let q = GridField::from_fn(g, |_, _, z| z.conj());
    let p = compute_p(u.field(), &q)?;
    build_uv_general(&u, &du, &q, &p, c(1.0, 0.0))
}

fn flatness(r: &mut Report, fx: &Fixtures) -> Result<()> {
    let s3 = 3f64.sqrt();
    for kind in [FixtureKind::Umbilic, FixtureKind::LinearQ] {
        for (label, l) in [("1", c(1.0, 0.0)), ("i", c(0.0, 1.0)), ("sqrt3", c(s3, 0.0))] {
            let key = format!("{}.lambda_{label}", kind.name());
            let mut finest = None;
            let series = fx.series(kind, |f| {
                let res = zero_curvature_residual(&build_uv(&f.u, &f.du, &f.q, l)?);
                finest = Some(diag_norm(&res));
                Ok(core_norm(&res).max)
            })?;
            r.norm(&key, finest.unwrap_or_default());
            r.check_refinement(&format!("{key}.core"), &series, tol::RATE_RANGE);
        }
    }
    let mut weakest = f64::INFINITY;
    for n in LEVELS {
        let res = diag_norm(&zero_curvature_residual(&antiholomorphic_control(n)?)).max;
        r.float(format!("control_conj_z.n{n}"), res);
        weakest = weakest.min(res);
    }
    r.check_min("control_conj_z.min", weakest, tol::CONTROL_FLOOR);
    Ok(())
}

fn path_difference(a: &FrameField, b: &FrameField) -> f64 {
    a.grid().nodes().map(|(i, j)| (a.get(i, j) - b.get(i, j)).frobenius()).fold(0.0, f64::max)
}

const ALL_KINDS: [FixtureKind; 4] =
    [FixtureKind::Umbilic, FixtureKind::LinearQ, FixtureKind::Sphere, FixtureKind::SphereLinearQ];

fn frame_integrity(r: &mut Report, fx: &Fixtures) -> Result<()> {
    let mut det: f64 = 0.0;
    let mut drift: f64 = 0.0;
    for kind in ALL_KINDS {
        let series = fx.series(kind, |f| {
            det = det.max(f.psi.det_residual());
            drift = drift.max(f.psi.max_step_drift());
            Ok(path_difference(&f.psi, &integrate_frame_columns_first(&f.mc)))
        })?;
        r.check_refinement(&format!("path_dependence.{}", kind.name()), &series, UNBOUNDED);
    }
    r.float("max_step_drift", drift);
    let finest = LEVELS[LEVELS.len() - 1];
    let mut rate: f64 = 0.0;
    for kind in ALL_KINDS {
        rate = rate.max(fx.get(kind, finest)?.psi.max_drift_rate());
    }
    r.check_max(&format!("drift_per_length.n{finest}"), rate, tol::DRIFT_RATE);
    r.check_max("det_after_renormalization", det, tol::DET);

    // Constant connection against its exponential.
    let u = crate::minkowski::E1 * c(0.3, 0.1) + crate::minkowski::E2_HAT * 0.75;
    let v = crate::minkowski::E1 * c(-0.3, 0.1) + crate::minkowski::E3_HAT * 0.25;
    let mut errs = Vec::new();
    for n in [17, 33] {
        let g = Grid::centered_square(1.0, n)?;
        let mc = MaurerCartanData::constant(g, u, v, c(1.0, 0.0))?;
        let psi = integrate_frame(&mc);
        let (_, j0) = g.base_point();
        errs.push((psi.get(n - 1, j0) - (u + v).exp()).frobenius());
        r.float(format!("rk4_vs_exp.n{n}"), errs[errs.len() - 1]);
    }
    r.check_range("rk4_vs_exp.ratio", errs[0] / errs[1], tol::RK4_RANGE);
    Ok(())
}

fn reality(r: &mut Report, fx: &Fixtures) -> Result<()> {
    let n = LEVELS[LEVELS.len() - 1];
    for (kind, form) in [
        (FixtureKind::Umbilic, RealForm::Su11),
        (FixtureKind::LinearQ, RealForm::Su11),
        (FixtureKind::Sphere, RealForm::Su2),
    ] {
        let f = fx.get(kind, n)?;
        let l0 = lambda0(f.k())?;
        let key = kind.name();
        r.float(format!("{key}.lambda0"), l0);
        let mc0 = build_uv(&f.u, &f.du, &f.q, c(l0, 0.0))?;
        r.check_max(&format!("{key}.reality.lambda0"), reality_residual(&mc0, form), tol::REALITY);
        let psi0 = integrate_frame(&mc0);
        r.check_max(&format!("{key}.unitarity.lambda0"), frame_unitarity_residual(&psi0, form), tol::UNITARITY);
        r.check_min(&format!("{key}.reality.lambda_1"), reality_residual(&f.mc, form), tol::CONTROL_FLOOR);
        r.check_min(
            &format!("{key}.unitarity.lambda_1"),
            frame_unitarity_residual(&f.psi, form),
            tol::CONTROL_FLOOR,
        );
    }
    Ok(())
}

fn curvature_stats(f: &Fixture) -> Result<(GridField<f64>, f64)> {
    let kn = curvature(&f.forms)?;
    let g = f.grid();
    let vals: Vec<f64> = g.diagnostic_nodes().map(|(i, j)| kn.get(i, j)).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
    let err = kn.map(|v| (v - f.k()).abs());
    Ok((err, var.sqrt() / f.k().abs()))
}

fn curvature_constancy(r: &mut Report, fx: &Fixtures) -> Result<()> {
    let n = LEVELS[LEVELS.len() - 1];
    for kind in ALL_KINDS {
        let key = kind.name();
        let f = fx.get(kind, n)?;
        let (err, spread) = curvature_stats(&f)?;
        r.float(format!("{key}.target"), f.k());
        r.norm(&format!("{key}.error"), diag_norm(&err));
        r.check_max(&format!("{key}.error.final"), diag_norm(&err).max, tol::CURVATURE);
        r.check_max(&format!("{key}.stddev_over_k"), spread, tol::CURVATURE_SPREAD);
        let series = fx.series(kind, |f| Ok(core_norm(&curvature_stats(f)?.0).max))?;
        r.check_refinement(&format!("{key}.error.core"), &series, UNBOUNDED);
    }
    Ok(())
}

/// `f' = cosh(phi) f + sinh(phi) n` for `phi = |z|^2/2`. The displaced pair
/// is no longer Legendrian and `<df', df'>` picks up `(d phi)^2 = zbar^2/4`.
fn displaced_dbar(f: &Fixture) -> f64 {
    let s = f.surface.normal_displaced(|z| 0.5 * z.norm_sqr());
    let (_, dbar) = klotz_recover(&fundamental_forms_numeric(&s));
    core_norm(&dbar).max
}

fn klotz(r: &mut Report, fx: &Fixtures) -> Result<()> {
    for kind in [FixtureKind::Umbilic, FixtureKind::LinearQ, FixtureKind::Sphere] {
        let key = kind.name();
        let q_err = fx.series(kind, |f| {
            let (qn, _) = klotz_recover(&f.forms);
            let g = f.grid();
            Ok(core_norm(&GridField::from_fn(g, |i, j, z| (qn.get(i, j) - f.q.value(z)).norm())).max)
        })?;
        r.check_refinement(&format!("{key}.q_recovery.core"), &q_err, UNBOUNDED);
        let dbar = fx.series(kind, |f| Ok(core_norm(&klotz_recover(&f.forms).1).max))?;
        r.check_refinement(&format!("{key}.dbar_q.core"), &dbar, UNBOUNDED);
        let control = fx.series(kind, |f| Ok(displaced_dbar(f)))?;
        for (n, v) in &control {
            r.float(format!("{key}.control_displaced_normal.n{n}"), *v);
        }
        let weakest = control.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        r.check_min(&format!("{key}.control_displaced_normal.min"), weakest, tol::CONTROL_FLOOR);
    }
    Ok(())
}

fn associated_family(r: &mut Report, fx: &Fixtures) -> Result<()> {
    let samples: Vec<Complex64> = (0..8).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 4.0)).collect();
    r.int("samples", samples.len() as i64);
    for kind in [FixtureKind::Umbilic, FixtureKind::LinearQ] {
        let key = kind.name();
        let mut k_dev: f64 = 0.0;
        let mut second = Vec::new();
        let mut qdev = Vec::new();
        for n in LEVELS {
            let f = fx.get(kind, n)?;
            let g = f.grid();
            let (mut d2, mut dq): (f64, f64) = (0.0, 0.0);
            for &l in &samples {
                let (_, s) = f.surface_at(l)?;
                let forms = fundamental_forms_numeric(&s);
                let kn = curvature(&forms)?;
                k_dev = k_dev.max(diag_norm(&kn.map(|v| (v - f.k()).abs())).max);
                let dev2 = GridField::from_fn(g, |i, j, _| {
                    form_distance(&forms.get(i, j).second, &f.forms.get(i, j).second)
                });
                d2 = d2.max(core_norm(&dev2).max);
                let scale = l.powi(-2);
                let devq = GridField::from_fn(g, |i, j, z| (forms.get(i, j).q - f.q.value(z) * scale).norm());
                dq = dq.max(core_norm(&devq).max);
            }
            second.push((n, d2));
            qdev.push((n, dq));
        }
        r.check_refinement(&format!("{key}.second_form_deviation.core"), &second, UNBOUNDED);
        r.check_max(&format!("{key}.curvature_deviation"), k_dev, tol::FAMILY_CURVATURE);
        r.check_refinement(&format!("{key}.q_times_lambda_sq_deviation.core"), &qdev, UNBOUNDED);
    }
    Ok(())
}

fn form_relation(r: &mut Report, fx: &Fixtures) -> Result<()> {
    for kind in ALL_KINDS {
        let key = kind.name();
        let series = fx.series(kind, |f| {
            let g = f.grid();
            let res = GridField::from_fn(g, |i, j, z| {
                let h = mean_curvature_closed(f.u.u(i, j), f.q.value(z), f.u.sigma());
                f.forms.get(i, j).relation_residual(h, f.k())
            });
            Ok(core_norm(&res).max)
        })?;
        r.check_refinement(&format!("{key}.residual.core"), &series, UNBOUNDED);
        let h_err = fx.series(kind, |f| {
            let hn = mean_curvature(&f.forms)?;
            let g = f.grid();
            Ok(core_norm(&GridField::from_fn(g, |i, j, z| {
                (hn.get(i, j) - mean_curvature_closed(f.u.u(i, j), f.q.value(z), f.u.sigma())).abs()
            }))
            .max)
        })?;
        r.check_refinement(&format!("{key}.mean_curvature_error.core"), &h_err, UNBOUNDED);
    }
    // The half-size mean curvature variant at Q = 0, for comparison only.
    let f = fx.get(FixtureKind::Umbilic, LEVELS[LEVELS.len() - 1])?;
    let (i0, j0) = f.grid().base_point();
    let z0 = f.grid().z(i0, j0);
    let numeric = mean_curvature(&f.forms)?.get(i0, j0);
    let derived = mean_curvature_closed(f.u.u(i0, j0), f.q.value(z0), f.u.sigma());
    let half = mean_curvature_half(f.u.u(i0, j0), f.q.value(z0), f.u.sigma());
    r.float("umbilic.h_numeric", numeric);
    r.float("umbilic.h_derived", derived);
    r.float("umbilic.h_half_variant", half);
    r.float("umbilic.h_numeric_over_half_variant", numeric / half);
    let with_half = diag_norm(&GridField::from_fn(f.grid(), |i, j, z| {
        let h = mean_curvature_half(f.u.u(i, j), f.q.value(z), f.u.sigma());
        f.forms.get(i, j).relation_residual(h, f.k())
    }));
    r.norm("umbilic.residual_with_half_variant", with_half);
    Ok(())
}

fn energy(r: &mut Report, fx: &Fixtures) -> Result<()> {
    let thetas = [("0", 0.0), ("pi_4", FRAC_PI_4), ("pi_2", FRAC_PI_2)];
    for kind in ALL_KINDS {
        let key = kind.name();
        let mut spread: Vec<f64> = Vec::new();
        for (label, theta) in thetas {
            let mut ratio = 1.0;
            let mut hopf = Vec::new();
            let mut dirichlet = Vec::new();
            for n in LEVELS {
                let f = fx.get(kind, n)?;
                let l = Complex64::from_polar(lambda0(f.k())?, theta);
                let psi = integrate_frame(&build_uv(&f.u, &f.du, &f.q, l)?);
                let e = energy_check(&lagrangian_map(&psi)?, &f.u, &f.q, theta)?;
                hopf.push((n, core_norm(&e.hopf).max));
                dirichlet.push((n, core_norm(&e.dirichlet).max));
                ratio = e.min_conformality_ratio;
            }
            spread.push(hopf[hopf.len() - 1].1);
            let k = format!("{key}.theta_{label}");
            r.check_refinement(&format!("{k}.hopf.core"), &hopf, UNBOUNDED);
            r.check_refinement(&format!("{k}.dirichlet.core"), &dirichlet, UNBOUNDED);
            r.float(format!("{k}.min_conformality_ratio"), ratio);
        }
        let (lo, hi) = spread.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), v| (a.min(*v), b.max(*v)));
        r.float(format!("{key}.hopf_spread_over_theta"), hi - lo);
    }
    Ok(())
}

fn converse(r: &mut Report) -> Result<()> {
    let cases = [
        (-0.9, SeedTarget::H2),
        (-0.5, SeedTarget::H2),
        (-0.25, SeedTarget::H2),
        (-0.1, SeedTarget::H2),
        (0.5, SeedTarget::S2),
        (3.0, SeedTarget::S2),
    ];
    let g = Grid::inscribed(0.8, 33)?;
    for (k, target) in cases {
        let key = format!("k_{k}");
        let l0 = lambda0(k)?;
        r.float(format!("{key}.lambda0"), l0);
        let (_, back) = converse_curvature(l0, target);
        r.check_max(&format!("{key}.curvature_round_trip"), (back - k).abs(), tol::CONVERSE);
        let seed = HarmonicSeed::umbilic(&g, target, QDomain::UnitDisk)?;
        let data = converse_rescale(&seed, c(l0, 0.0))?;
        r.check_max(&format!("{key}.rescaled_curvature"), (data.k - k).abs(), tol::CONVERSE);
        r.check_max(&format!("{key}.lambda0_round_trip"), data.roundtrip_error / l0, tol::CONVERSE);
        let du = DerivativeField::from_metric(&data.u);
        let res = converse_connection_residual(&seed, &data, du.du(), c(l0, 0.0));
        r.check_max(&format!("{key}.connection_match"), res, tol::ROUNDOFF_FLOOR);
    }
    Ok(())
}

fn harmonicity(r: &mut Report, fx: &Fixtures) -> Result<()> {
    for kind in [FixtureKind::Umbilic, FixtureKind::LinearQ, FixtureKind::Sphere] {
        let key = kind.name();
        let mut wedge: f64 = 0.0;
        let series = fx.series(kind, |f| {
            let h = harmonicity_residual(&f.mc);
            wedge = wedge.max(h.wedge);
            Ok(core_norm(&h.two_form).max)
        })?;
        r.check_refinement(&format!("{key}.residual.core"), &series, UNBOUNDED);
        r.float(format!("{key}.wedge"), wedge);
    }
    let mut weakest = f64::INFINITY;
    for n in LEVELS {
        let v = diag_norm(&harmonicity_residual(&antiholomorphic_control(n)?).two_form).max;
        r.float(format!("control_conj_z.n{n}"), v);
        weakest = weakest.min(v);
    }
    r.check_min("control_conj_z.min", weakest, tol::CONTROL_FLOOR);

    let g = Grid::centered_square(0.5, 9)?;
    let p = compute_p(&GridField::constant(g, 0.0), &GridField::from_fn(g, |_, _, z| z.conj()))?;
    let (i0, j0) = g.base_point();
    r.check_max("compute_p_at_origin", (p.get(i0, j0) - c(-0.5, 0.0)).norm(), tol::COMPUTE_P);
    Ok(())
}

fn weak_metric(r: &mut Report, fx: &Fixtures) -> Result<()> {
    for kind in [FixtureKind::Umbilic, FixtureKind::LinearQ, FixtureKind::Sphere] {
        let key = kind.name();
        let series = fx.series(kind, |f| {
            let wk = weak_metric_numeric(&f.forms, f.k());
            let g = f.grid();
            Ok(core_norm(&GridField::from_fn(g, |i, j, z| {
                let cf = weak_coefficient(f.u.u(i, j), f.q.value(z));
                form_distance(&wk.get(i, j), &RealForm2 { e: cf, f: 0.0, g: cf })
            }))
            .max)
        })?;
        r.check_refinement(&format!("{key}.closed_vs_numeric.core"), &series, UNBOUNDED);
    }

    // Radial lengths on squares inscribed in growing circles. With Q = 0 the
    // weak metric is 2 e^u |dz|^2, so its lengths are sqrt(2) times those of
    // e^u |dz|^2, whose radial distance is (2/sqrt|K|) artanh |z|.
    let k: f64 = -0.75;
    let q = QDiff::zero(QDomain::UnitDisk);
    let mut prev = 0.0;
    let mut growing = true;
    for radius in [0.6, 0.8, 0.9] {
        let g = Grid::inscribed(radius, 513)?;
        let u = umbilic_seed(k, &g)?;
        let weak = GridField::from_fn(g, |i, j, z| weak_coefficient(u.u(i, j), q.value(z)));
        let (len, end) = ray_length(&weak, RayDirection::Diagonal);
        let (first, _) = ray_length(&u.field().map(f64::exp), RayDirection::Diagonal);
        let exact = 2.0 / k.abs().sqrt() * end.atanh();
        let key = format!("radial_r{radius}");
        r.float(format!("{key}.end_radius"), end);
        r.float(format!("{key}.closed_form"), exact);
        r.check_max(&format!("{key}.first_form_length_error"), (first - exact).abs(), tol::RADIAL);
        r.check_max(
            &format!("{key}.weak_length_error"),
            (len - std::f64::consts::SQRT_2 * exact).abs(),
            tol::RADIAL,
        );
        growing &= len > prev;
        prev = len;
    }
    r.outcome("radial_lengths_grow", growing);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minkowski_and_converse_pass() {
        let fx = Fixtures::new();
        for id in [1, 12] {
            let res = run_criterion(id, &fx);
            assert!(res.passed(), "{}\n{}", res.line(), res.report.render());
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(99, &Fixtures::new()).passed());
    }
}
