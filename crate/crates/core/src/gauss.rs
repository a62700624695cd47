//! The Gauss equation `(1/4) Lap u + (K/2)(e^u - |Q|^2 e^-u) = 0` for constant
//! curvature data: a damped Newton solver on the 5-point discretization,
//! closed-form seeds and a one-dimensional shooting oracle.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridField, NormPair};
use crate::linsolve::{banded_solve, pcg_negated, Stencil};
use crate::quadratic::{QDiff, QDomain};

pub const GAUSS_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITER: usize = 100;
const MAX_HALVINGS: usize = 30;
const ARMIJO_C: f64 = 1e-4;
const CG_REL_TOL: f64 = 1e-12;

/// Curvatures this crate handles: `-1 < K < 0` or `K > 0`.
pub fn check_curvature(module: &'static str, k: f64) -> Result<()> {
    if k.is_finite() && ((k > -1.0 && k < 0.0) || k > 0.0) {
        Ok(())
    } else {
        Err(Error::OutOfRange { module, k })
    }
}

/// Closed-form metric functions with known `u` and `du = (u_x - i u_y)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticMetric {
    /// `e^u = s (1 - |z|^2)^-2`.
    Disk { scale: f64 },
    /// `e^u = s (1 + |z|^2)^-2`.
    Sphere { scale: f64 },
    Constant { u0: f64 },
}

impl AnalyticMetric {
    pub fn u(&self, z: Complex64) -> f64 {
        match *self {
            Self::Disk { scale } => scale.ln() - 2.0 * (1.0 - z.norm_sqr()).ln(),
            Self::Sphere { scale } => scale.ln() - 2.0 * (1.0 + z.norm_sqr()).ln(),
            Self::Constant { u0 } => u0,
        }
    }

    pub fn du(&self, z: Complex64) -> Complex64 {
        match *self {
            Self::Disk { .. } => z.conj() * (2.0 / (1.0 - z.norm_sqr())),
            Self::Sphere { .. } => z.conj() * (-2.0 / (1.0 + z.norm_sqr())),
            Self::Constant { .. } => Complex64::new(0.0, 0.0),
        }
    }

    /// The same function shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        let f = delta.exp();
        match *self {
            Self::Disk { scale } => Self::Disk { scale: scale * f },
            Self::Sphere { scale } => Self::Sphere { scale: scale * f },
            Self::Constant { u0 } => Self::Constant { u0: u0 + delta },
        }
    }
}

/// The conformal factor `u` on a grid together with the curvature it was
/// built for.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    u: GridField<f64>,
    k: f64,
    sigma: f64,
    analytic: Option<AnalyticMetric>,
}

impl MetricField {
    pub fn new(u: GridField<f64>, k: f64) -> Result<Self> {
        check_curvature("gauss_solver", k)?;
        Ok(Self::unchecked(u, k, None))
    }

    /// Samples a closed form, keeping it around for exact derivatives.
    pub fn from_analytic(grid: Grid, k: f64, a: AnalyticMetric) -> Result<Self> {
        check_curvature("gauss_solver", k)?;
        let u = GridField::from_fn(grid, |_, _, z| a.u(z));
        Ok(Self::unchecked(u, k, Some(a)))
    }

    pub(crate) fn unchecked(u: GridField<f64>, k: f64, analytic: Option<AnalyticMetric>) -> Self {
        Self {
            u,
            k,
            sigma: (1.0 + k).max(0.0).sqrt(),
            analytic,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn field(&self) -> &GridField<f64> {
        &self.u
    }

    pub fn u(&self, i: usize, j: usize) -> f64 {
        self.u.get(i, j)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn analytic(&self) -> Option<AnalyticMetric> {
        self.analytic
    }

    /// `e^{2u} > |Q|^2` at every node.
    pub fn check_immersion(&self, q: &QDiff) -> Result<()> {
        let g = *self.grid();
        for (i, j) in g.nodes() {
            let u = self.u(i, j);
            if !((2.0 * u).exp() > q.value(g.z(i, j)).norm_sqr()) {
                return Err(Error::ImmersionViolated { node: (i, j) });
            }
        }
        Ok(())
    }
}

/// `e^u = (4/|K|)(1 - |z|^2)^-2`, the complete metric of curvature `K < 0` on
/// the disk; with `Q = 0` it solves the Gauss equation exactly.
pub fn umbilic_seed(k: f64, grid: &Grid) -> Result<MetricField> {
    if !(k > -1.0 && k < 0.0) {
        return Err(Error::OutOfRange { module: "gauss_solver", k });
    }
    grid.check_inside_unit_disk()?;
    MetricField::from_analytic(*grid, k, AnalyticMetric::Disk { scale: 4.0 / k.abs() })
}

/// `e^u = (4/K)(1 + |z|^2)^-2`, the round metric of curvature `K > 0`.
pub fn spherical_seed(k: f64, grid: &Grid) -> Result<MetricField> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::OutOfRange { module: "gauss_solver", k });
    }
    MetricField::from_analytic(*grid, k, AnalyticMetric::Sphere { scale: 4.0 / k })
}

/// Residual at interior nodes for arbitrary `K` and sampled `|Q|^2`; zero on
/// the boundary.
pub fn gauss_residual_raw(u: &GridField<f64>, k: f64, q_abs2: &GridField<f64>) -> GridField<f64> {
    let g = *u.grid();
    GridField::from_fn(g, |i, j, _| {
        if g.is_boundary(i, j) {
            return 0.0;
        }
        let v = u.get(i, j);
        0.25 * u.laplacian(i, j) + 0.5 * k * (v.exp() - q_abs2.get(i, j) * (-v).exp())
    })
}

pub fn gauss_residual(u: &MetricField, q: &QDiff) -> GridField<f64> {
    gauss_residual_raw(u.field(), u.k(), &q.abs2_samples(u.grid()))
}

/// The `Q = 1` form `(1/4) Lap u + K sinh u`.
pub fn sinh_normal_residual(u: &MetricField) -> GridField<f64> {
    let g = *u.grid();
    let f = u.field();
    GridField::from_fn(g, |i, j, _| {
        if g.is_boundary(i, j) {
            0.0
        } else {
            0.25 * f.laplacian(i, j) + u.k() * f.get(i, j).sinh()
        }
    })
}

/// Dirichlet data. Boundary nodes give the boundary values; interior nodes
/// are the starting guess for Newton.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    values: GridField<f64>,
}

impl BoundaryData {
    pub fn from_field(values: GridField<f64>) -> Self {
        Self { values }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(Complex64) -> f64) -> Self {
        Self::from_field(GridField::from_fn(*grid, |_, _, z| f(z)))
    }

    /// Trace of the umbilic seed.
    pub fn umbilic(k: f64, grid: &Grid) -> Result<Self> {
        Ok(Self::from_field(umbilic_seed(k, grid)?.field().clone()))
    }

    /// `log((4/|K|)(1 - |z|^2)^-2 + |Q|)` on the disk. On the plane the
    /// disk factor is frozen at its value at the origin.
    pub fn heuristic(q: &QDiff, k: f64, grid: &Grid) -> Result<Self> {
        check_curvature("gauss_solver", k)?;
        Self::heuristic_unchecked(q, k, grid)
    }

    pub(crate) fn heuristic_unchecked(q: &QDiff, k: f64, grid: &Grid) -> Result<Self> {
        let s = 4.0 / k.abs();
        let disk = q.domain() == QDomain::UnitDisk;
        if disk {
            grid.check_inside_unit_disk()?;
        }
        Ok(Self::from_fn(grid, |z| {
            let w = if disk { 1.0 - z.norm_sqr() } else { 1.0 };
            (s / (w * w) + q.value(z).norm()).ln()
        }))
    }

    /// Adds `delta` to the boundary values only.
    pub fn perturbed(&self, delta: f64) -> Self {
        let g = *self.values.grid();
        let v = &self.values;
        Self::from_field(GridField::from_fn(g, |i, j, _| {
            v.get(i, j) + if g.is_boundary(i, j) { delta } else { 0.0 }
        }))
    }

    pub fn values(&self) -> &GridField<f64> {
        &self.values
    }

    pub fn grid(&self) -> &Grid {
        self.values.grid()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    /// Max-norm residual before each Newton step and after the last one.
    pub residual_history: Vec<f64>,
    pub linear_iterations: Vec<usize>,
    pub step_lengths: Vec<f64>,
    pub final_residual: NormPair,
}

impl SolveStats {
    pub fn newton_iterations(&self) -> usize {
        self.step_lengths.len()
    }
}

/// Damped Newton on the interior unknowns with Dirichlet data from `u0`.
/// Works for any `K`; the linear solver is CG when the Jacobian is negative
/// definite and banded elimination otherwise.
pub(crate) fn newton(
    u0: GridField<f64>,
    k: f64,
    q_abs2: &GridField<f64>,
) -> Result<(GridField<f64>, SolveStats)> {
    let g = *u0.grid();
    let (mx, my) = (g.nx() - 2, g.ny() - 2);
    let n = mx * my;
    let interior = |m: usize| (m % mx + 1, m / mx + 1);
    let fail = |reason: String| Error::NonConvergence { module: "gauss_solver", reason };

    let residual = |u: &GridField<f64>| -> Vec<f64> {
        let r = gauss_residual_raw(u, k, q_abs2);
        (0..n).map(|m| {
            let (i, j) = interior(m);
            r.get(i, j)
        })
        .collect()
    };
    let max_abs = |r: &[f64]| r.iter().fold(0.0_f64, |a, v| if v.is_nan() { f64::NAN } else { a.max(v.abs()) });
    let sq = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut u = u0;
    let mut stats = SolveStats::default();
    let mut r = residual(&u);
    let mut delta = vec![0.0; n];
    loop {
        let rmax = max_abs(&r);
        stats.residual_history.push(rmax);
        if !rmax.is_finite() {
            return Err(fail("residual is not finite".into()));
        }
        if rmax <= GAUSS_TOL {
            break;
        }
        if stats.step_lengths.len() >= MAX_NEWTON_ITER {
            return Err(fail(format!(
                "iteration cap {MAX_NEWTON_ITER} reached with max residual {rmax:e}"
            )));
        }
        let diag: Vec<f64> = (0..n)
            .map(|m| {
                let (i, j) = interior(m);
                let v = u.get(i, j);
                0.5 * k * (v.exp() + q_abs2.get(i, j) * (-v).exp())
            })
            .collect();
        let op = Stencil { mx, my, h: g.h(), lap_coeff: 0.25, diag: &diag };
        if k < 0.0 {
            let out = pcg_negated(&op, &r, &mut delta, CG_REL_TOL, 20 * n + 100);
            if !out.converged {
                return Err(fail(format!("CG stalled after {} iterations", out.iterations)));
            }
            stats.linear_iterations.push(out.iterations);
        } else {
            let neg: Vec<f64> = r.iter().map(|v| -v).collect();
            delta = banded_solve(&op, &neg).ok_or_else(|| fail("singular Jacobian".into()))?;
            stats.linear_iterations.push(1);
        }

        let phi0 = sq(&r);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut trial = u.clone();
            for (m, d) in delta.iter().enumerate() {
                let (i, j) = interior(m);
                trial.set(i, j, u.get(i, j) + t * d);
            }
            let rt = residual(&trial);
            let phi = sq(&rt);
            if phi.is_finite() && phi <= (1.0 - 2.0 * ARMIJO_C * t) * phi0 {
                accepted = Some((trial, rt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((trial, rt)) => {
                u = trial;
                r = rt;
                stats.step_lengths.push(t);
            }
            None => {
                return Err(fail(format!(
                    "line search failed after {MAX_HALVINGS} halvings at max residual {rmax:e}"
                )))
            }
        }
    }
    stats.final_residual = NormPair::over(r.iter().copied());
    Ok((u, stats))
}

/// Solves the Gauss equation with Dirichlet data `bc` and checks the
/// immersion condition on the result.
pub fn solve_gauss(
    q: &QDiff,
    k: f64,
    grid: &Grid,
    bc: &BoundaryData,
) -> Result<(MetricField, SolveStats)> {
    check_curvature("gauss_solver", k)?;
    if bc.grid() != grid {
        return Err(Error::InvalidGrid("boundary data lives on a different grid".into()));
    }
    if q.domain() == QDomain::UnitDisk {
        grid.check_inside_unit_disk()?;
    }
    let g = *grid;
    if let Some((i, j)) = g.nodes().find(|&(i, j)| !bc.values().get(i, j).is_finite()) {
        return Err(Error::validation("bc", format!("non-finite value at node ({i}, {j})")));
    }
    let (u, stats) = newton(bc.values().clone(), k, &q.abs2_samples(grid))?;
    let metric = MetricField::unchecked(u, k, None);
    metric.check_immersion(q)?;
    Ok((metric, stats))
}

/// A one-dimensional profile sampled at uniformly spaced points.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeProfile {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// `|u(a) - u_b|` after shooting.
    pub mismatch: f64,
}

impl OdeProfile {
    /// Linear interpolation, clamped to the sampled range.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.x.len();
        let (a, b) = (self.x[0], self.x[n - 1]);
        let s = ((x - a) / (b - a) * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let t = s - i as f64;
        self.u[i] * (1.0 - t) + self.u[i + 1] * t
    }
}

/// Shooting solve of `(1/4) u'' + (K/2)(e^u - c^2 e^-u) = 0` on `[-a, a]` with
/// `u(-a) = bc.0`, `u(a) = bc.1`, sampled at `samples` uniform points with
/// `substeps` RK4 steps between samples.
pub fn ode_oracle(
    c: f64,
    k: f64,
    half_width: f64,
    bc: (f64, f64),
    samples: usize,
    substeps: usize,
) -> Result<OdeProfile> {
    let fail = |reason: String| Error::NonConvergence { module: "gauss_solver", reason };
    if !(c > 0.0 && half_width > 0.0 && samples >= 2 && substeps >= 1) {
        return Err(fail("invalid oracle parameters".into()));
    }
    let c2 = c * c;
    // state: u, u', du/ds, du'/ds
    let rhs = |y: [f64; 4]| -> [f64; 4] {
        let (eu, emu) = (y[0].exp(), (-y[0]).exp());
        let f = -2.0 * k * (eu - c2 * emu);
        let df = -2.0 * k * (eu + c2 * emu);
        [y[1], f, y[3], df * y[2]]
    };
    let h = 2.0 * half_width / ((samples - 1) * substeps) as f64;
    let shoot = |s: f64, record: bool| -> (Vec<f64>, [f64; 4]) {
        let mut y = [bc.0, s, 0.0, 1.0];
        let mut out = Vec::with_capacity(if record { samples } else { 0 });
        if record {
            out.push(y[0]);
        }
        for _ in 0..samples - 1 {
            for _ in 0..substeps {
                let k1 = rhs(y);
                let k2 = rhs(std::array::from_fn(|m| y[m] + 0.5 * h * k1[m]));
                let k3 = rhs(std::array::from_fn(|m| y[m] + 0.5 * h * k2[m]));
                let k4 = rhs(std::array::from_fn(|m| y[m] + h * k3[m]));
                y = std::array::from_fn(|m| y[m] + h / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]));
            }
            if record {
                out.push(y[0]);
            }
        }
        (out, y)
    };

    let mut s = (bc.1 - bc.0) / (2.0 * half_width);
    let (_, mut end) = shoot(s, false);
    let mut g = end[0] - bc.1;
    for _ in 0..60 {
        if g.abs() <= 1e-13 * (1.0 + bc.1.abs()) {
            break;
        }
        if !(end[2].is_finite() && end[2] != 0.0) {
            return Err(fail("shooting sensitivity degenerate".into()));
        }
        let step = -g / end[2];
        let mut t = 1.0;
        loop {
            let (_, e) = shoot(s + t * step, false);
            let gt = e[0] - bc.1;
            if gt.is_finite() && gt.abs() < g.abs() {
                s += t * step;
                end = e;
                g = gt;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                return Err(fail(format!("shooting stalled at mismatch {g:e}")));
            }
        }
    }
    if g.abs() > GAUSS_TOL {
        return Err(fail(format!("shooting mismatch {g:e}")));
    }
    let (u, _) = shoot(s, true);
    let x = (0..samples)
        .map(|m| -half_width + 2.0 * half_width * m as f64 / (samples - 1) as f64)
        .collect();
    Ok(OdeProfile { x, u, mismatch: g.abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::NormPair;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn interior_max(f: &GridField<f64>) -> f64 {
        NormPair::over(f.grid().interior().map(|(i, j)| f.get(i, j))).max
    }

    #[test]
    fn seed_values() {
        let g = Grid::inscribed(0.8, 33).unwrap();
        let s = umbilic_seed(-0.75, &g).unwrap();
        let (i0, j0) = g.base_point();
        assert!((s.u(i0, j0) - (16.0_f64 / 3.0).ln()).abs() < 1e-14);
        let a = AnalyticMetric::Disk { scale: 4.0 / 0.75 };
        assert!((a.u(c(0.5, 0.0)) - (256.0_f64 / 27.0).ln()).abs() < 1e-14);
        assert!(umbilic_seed(0.5, &g).is_err());
        assert!(matches!(
            umbilic_seed(-0.75, &Grid::centered_square(0.8, 33).unwrap()),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn residual_examples() {
        let g = Grid::inscribed(0.8, 17).unwrap();
        let zero = MetricField::new(GridField::constant(g, 0.0), -0.75).unwrap();
        let r = gauss_residual(&zero, &QDiff::zero(QDomain::UnitDisk));
        for (i, j) in g.interior() {
            assert_eq!(r.get(i, j), -0.375);
        }
        let cst = c(0.6, 0.0);
        let bal = MetricField::new(GridField::constant(g, cst.re.ln()), -0.75).unwrap();
        let r = gauss_residual(&bal, &QDiff::constant(cst, QDomain::UnitDisk));
        assert!(interior_max(&r) < 1e-15);
        let one = MetricField::new(GridField::constant(g, 1.0), -0.75).unwrap();
        let s = sinh_normal_residual(&one);
        let (i, j) = g.base_point();
        assert!((s.get(i, j) + 0.75 * 1.0_f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn sinh_form_matches_q_equal_one() {
        let g = Grid::centered_square(0.5, 17).unwrap();
        let u = MetricField::new(GridField::from_fn(g, |_, _, z| (3.0 * z.re).sin() + z.im), -0.3).unwrap();
        let a = sinh_normal_residual(&u);
        let b = gauss_residual(&u, &QDiff::constant(c(1.0, 0.0), QDomain::Plane));
        for (i, j) in g.nodes() {
            assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-13);
        }
    }

    #[test]
    fn solver_recovers_seed_from_exact_trace() {
        let g = Grid::inscribed(0.8, 33).unwrap();
        let seed = umbilic_seed(-0.75, &g).unwrap();
        let q = QDiff::zero(QDomain::UnitDisk);
        let bc = BoundaryData::umbilic(-0.75, &g).unwrap();
        let start = BoundaryData::from_field(GridField::from_fn(g, |i, j, _| {
            bc.values().get(i, j) + if g.is_boundary(i, j) { 0.0 } else { 0.3 }
        }));
        let (u, stats) = solve_gauss(&q, -0.75, &g, &start).unwrap();
        assert!(stats.final_residual.max <= GAUSS_TOL);
        let err = g.nodes().map(|(i, j)| (u.u(i, j) - seed.u(i, j)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-2, "{err}");
    }

    #[test]
    fn oracle_constant_solution() {
        let p = ode_oracle(2.0, -0.75, 0.5, (2.0_f64.ln(), 2.0_f64.ln()), 11, 4).unwrap();
        assert!(p.u.iter().all(|v| (v - 2.0_f64.ln()).abs() < 1e-13));
    }

    #[test]
    fn oracle_symmetric_profile() {
        let p = ode_oracle(1.0, -0.75, 0.5, (0.5, 0.5), 101, 16).unwrap();
        assert!(p.mismatch <= GAUSS_TOL);
        let mid = p.u[50];
        assert!(mid > 0.0 && mid < 0.5);
        for m in 0..101 {
            assert!((p.u[m] - p.u[100 - m]).abs() < 1e-9);
        }
    }
}
