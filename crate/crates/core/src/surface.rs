//! Immersions `f = Psi Psi*` with normals `n = Psi e1 Psi*`, their numeric
//! fundamental forms and the closed forms they should reproduce.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::cmat::{C2x2, I};
use crate::error::{Error, Result};
use crate::frame::FrameField;
use crate::gauss::MetricField;
use crate::grid::{Grid, GridField, NormPair};
use crate::minkowski::{mink_from_herm, mink_inner_c, HermMatrix, MinkVector, E1};
use crate::quadratic::QDiff;

/// Surface invariants must hold to this accuracy.
pub const SURFACE_TOL: f64 = 1e-8;
/// `build_surface` refuses frames whose `det f` drifts further than this.
pub const DRIFT_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceData {
    f: GridField<C2x2>,
    n: GridField<C2x2>,
    lambda: Complex64,
}

/// Worst violations of `<f,f> = -1`, `<n,n> = 1`, `<f,n> = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SurfaceInvariants {
    pub det_f: f64,
    pub norm_n: f64,
    pub f_dot_n: f64,
    pub min_trace_f: f64,
}

impl SurfaceInvariants {
    pub fn max(&self) -> f64 {
        self.det_f.max(self.norm_n).max(self.f_dot_n)
    }
}

pub fn build_surface(psi: &FrameField) -> Result<SurfaceData> {
    let g = *psi.grid();
    let f = GridField::from_fn(g, |i, j, _| {
        let p = psi.get(i, j);
        p * p.adjoint()
    });
    let n = GridField::from_fn(g, |i, j, _| {
        let p = psi.get(i, j);
        p * E1 * p.adjoint()
    });
    for (i, j) in g.nodes() {
        let drift = (f.get(i, j).det() - 1.0).norm();
        if !(drift <= DRIFT_LIMIT) {
            return Err(Error::HyperboloidDrift { node: (i, j), drift });
        }
    }
    Ok(SurfaceData { f, n, lambda: psi.lambda() })
}

impl SurfaceData {
    /// A pair `(f, n)` given directly; no checks.
    pub fn from_fields(f: GridField<C2x2>, n: GridField<C2x2>, lambda: Complex64) -> Self {
        Self { f, n, lambda }
    }

    pub fn grid(&self) -> &Grid {
        self.f.grid()
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn f(&self) -> &GridField<C2x2> {
        &self.f
    }

    pub fn n(&self) -> &GridField<C2x2> {
        &self.n
    }

    pub fn f_at(&self, i: usize, j: usize) -> HermMatrix {
        HermMatrix::from_c2x2(&self.f.get(i, j))
    }

    pub fn n_at(&self, i: usize, j: usize) -> HermMatrix {
        HermMatrix::from_c2x2(&self.n.get(i, j))
    }

    pub fn point(&self, i: usize, j: usize) -> MinkVector {
        mink_from_herm(&self.f_at(i, j))
    }

    pub fn invariants(&self) -> SurfaceInvariants {
        let mut out = SurfaceInvariants { min_trace_f: f64::INFINITY, ..Default::default() };
        for (i, j) in self.grid().nodes() {
            let (f, n) = (self.f.get(i, j), self.n.get(i, j));
            out.det_f = out.det_f.max((mink_inner_c(&f, &f) + 1.0).norm());
            out.norm_n = out.norm_n.max((mink_inner_c(&n, &n) - 1.0).norm());
            out.f_dot_n = out.f_dot_n.max(mink_inner_c(&f, &n).norm());
            out.min_trace_f = out.min_trace_f.min(f.trace().re);
        }
        out
    }

    /// The pair displaced along its normal lines by a varying distance
    /// `phi`: `f' = cosh(phi) f + sinh(phi) n`, `n' = sinh(phi) f + cosh(phi) n`.
    /// Pointwise still a unit tangent vector of H^3, but no longer Legendrian.
    pub fn normal_displaced(&self, phi: impl Fn(Complex64) -> f64) -> Self {
        let g = *self.grid();
        let f = GridField::from_fn(g, |i, j, z| {
            let t = phi(z);
            self.f.get(i, j) * t.cosh() + self.n.get(i, j) * t.sinh()
        });
        let n = GridField::from_fn(g, |i, j, z| {
            let t = phi(z);
            self.f.get(i, j) * t.sinh() + self.n.get(i, j) * t.cosh()
        });
        Self { f, n, lambda: self.lambda }
    }
}

/// Symmetric 2x2 form `[[e, f], [f, g]]` in the coordinates `(x, y)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RealForm2 {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl RealForm2 {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            e: a * self.e + b * other.e,
            f: a * self.f + b * other.f,
            g: a * self.g + b * other.g,
        }
    }

    fn max_abs(&self) -> f64 {
        self.e.abs().max(self.f.abs()).max(self.g.abs())
    }

    /// `Q dz^2 + 2 l dz dzbar + conj(Q) dzbar^2` in real coordinates.
    pub fn from_complex(q: Complex64, l: f64) -> Self {
        Self { e: 2.0 * q.re + 2.0 * l, f: -2.0 * q.im, g: 2.0 * l - 2.0 * q.re }
    }
}

/// Numeric first, second and third fundamental forms at one node, in real
/// coordinates and in the complex `(Q, l)` split.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NumericForms {
    pub first: RealForm2,
    pub second: RealForm2,
    pub third: RealForm2,
    /// `<df, df>` with `d = (d/dx - i d/dy)/2`.
    pub q: Complex64,
    /// `<df, dbar f>`.
    pub ell: f64,
    /// `-<dbar f, d n>`.
    pub m: Complex64,
    pub q3: Complex64,
    pub ell3: f64,
    /// `<df, n>`, zero for a Legendrian pair.
    pub tangency: Complex64,
}

impl NumericForms {
    pub fn gaussian_curvature(&self) -> Option<f64> {
        let d = self.first.det();
        (d > 0.0).then(|| -1.0 + self.second.det() / d)
    }

    /// `tr(I^-1 II)/2`.
    pub fn mean_curvature(&self) -> Option<f64> {
        let (a, b) = (&self.first, &self.second);
        let d = a.det();
        (d > 0.0).then(|| (a.g * b.e - 2.0 * a.f * b.f + a.e * b.g) / (2.0 * d))
    }

    /// `III - 2H II + (K+1) I`, largest component.
    pub fn relation_residual(&self, h: f64, k: f64) -> f64 {
        self.third
            .combine(1.0, &self.second, -2.0 * h)
            .combine(1.0, &self.first, k + 1.0)
            .max_abs()
    }
}

pub fn fundamental_forms_numeric(s: &SurfaceData) -> GridField<NumericForms> {
    let g = *s.grid();
    GridField::from_fn(g, |i, j, _| {
        let (fx, fy) = (s.f.dx(i, j), s.f.dy(i, j));
        let (nx, ny) = (s.n.dx(i, j), s.n.dy(i, j));
        let ip = |a: &C2x2, b: &C2x2| mink_inner_c(a, b).re;
        let first = RealForm2 { e: ip(&fx, &fx), f: ip(&fx, &fy), g: ip(&fy, &fy) };
        let second = RealForm2 {
            e: -ip(&fx, &nx),
            f: -0.5 * (ip(&fx, &ny) + ip(&fy, &nx)),
            g: -ip(&fy, &ny),
        };
        let third = RealForm2 { e: ip(&nx, &nx), f: ip(&nx, &ny), g: ip(&ny, &ny) };
        let d = |ax: C2x2, ay: C2x2| (ax - ay * I) * 0.5;
        let dbar = |ax: C2x2, ay: C2x2| (ax + ay * I) * 0.5;
        let (df, dbf) = (d(fx, fy), dbar(fx, fy));
        let (dn, dbn) = (d(nx, ny), dbar(nx, ny));
        NumericForms {
            first,
            second,
            third,
            q: mink_inner_c(&df, &df),
            ell: mink_inner_c(&df, &dbf).re,
            m: -mink_inner_c(&dbf, &dn),
            q3: mink_inner_c(&dn, &dn),
            ell3: mink_inner_c(&dn, &dbn).re,
            tangency: mink_inner_c(&df, &s.n.get(i, j)),
        }
    })
}

/// Forms predicted by `(u, Q, sigma)`: `I = Q dz^2 + 2l dzdzbar + c.c.` with
/// `l = (e^u + |Q|^2 e^-u)/2`, `II = 2m dzdzbar` with
/// `m = sigma (e^u - |Q|^2 e^-u)/2`, and
/// `III = sigma^2 (-Q dz^2 + (e^u + |Q|^2 e^-u) dzdzbar - conj(Q) dzbar^2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedForms {
    pub q: Complex64,
    pub ell: f64,
    pub m: f64,
    pub q3: Complex64,
    pub ell3: f64,
}

impl ClosedForms {
    pub fn at(u: f64, q: Complex64, sigma: f64) -> Self {
        let (eu, emu) = (u.exp(), (-u).exp());
        let a = q.norm_sqr() * emu;
        Self {
            q,
            ell: 0.5 * (eu + a),
            m: 0.5 * sigma * (eu - a),
            q3: -q * sigma * sigma,
            ell3: 0.5 * sigma * sigma * (eu + a),
        }
    }

    pub fn first(&self) -> RealForm2 {
        RealForm2::from_complex(self.q, self.ell)
    }

    pub fn second(&self) -> RealForm2 {
        RealForm2 { e: 2.0 * self.m, f: 0.0, g: 2.0 * self.m }
    }

    pub fn third(&self) -> RealForm2 {
        RealForm2::from_complex(self.q3, self.ell3)
    }
}

/// Largest componentwise difference of two real forms.
pub fn form_distance(a: &RealForm2, b: &RealForm2) -> f64 {
    a.combine(1.0, b, -1.0).max_abs()
}

fn map_forms<T: Copy>(
    forms: &GridField<NumericForms>,
    f: impl Fn(&NumericForms) -> Option<T>,
) -> Result<GridField<T>>
where
    T: Default,
{
    let g = *forms.grid();
    let mut out = GridField::constant(g, T::default());
    for (i, j) in g.nodes() {
        let v = f(&forms.get(i, j)).ok_or(Error::DegenerateMetric { node: (i, j) })?;
        out.set(i, j, v);
    }
    Ok(out)
}

/// `K = -1 + det II / det I` at every node.
pub fn curvature(forms: &GridField<NumericForms>) -> Result<GridField<f64>> {
    map_forms(forms, NumericForms::gaussian_curvature)
}

pub fn mean_curvature(forms: &GridField<NumericForms>) -> Result<GridField<f64>> {
    map_forms(forms, NumericForms::mean_curvature)
}

/// `sigma (e^{2u} + |Q|^2) / (e^{2u} - |Q|^2)`, the value of `tr(I^-1 II)/2`
/// for these data.
pub fn mean_curvature_closed(u: f64, q: Complex64, sigma: f64) -> f64 {
    let (e2u, a) = ((2.0 * u).exp(), q.norm_sqr());
    sigma * (e2u + a) / (e2u - a)
}

/// The variant with an extra factor 1/2 that is sometimes quoted; it is
/// inconsistent with `III - 2H II + (K+1) I = 0` and kept for comparison.
pub fn mean_curvature_half(u: f64, q: Complex64, sigma: f64) -> f64 {
    0.5 * mean_curvature_closed(u, q, sigma)
}

/// Recovered Klotz differential `<df, df>` and `|dbar Q_num|` at every node
/// (meaningful away from the boundary).
pub fn klotz_recover(forms: &GridField<NumericForms>) -> (GridField<Complex64>, GridField<f64>) {
    let q = forms.map(|f| f.q);
    let g = *q.grid();
    let dbar = GridField::from_fn(g, |i, j, _| q.wirtinger_bar(i, j).norm());
    (q, dbar)
}

/// `2(e^u + |Q|^2 e^-u)`, the conformal coefficient of `I + III/(1+K)`.
pub fn weak_metric(u: &MetricField, q: &QDiff) -> GridField<f64> {
    let g = *u.grid();
    GridField::from_fn(g, |i, j, z| weak_coefficient(u.u(i, j), q.value(z)))
}

pub fn weak_coefficient(u: f64, q: Complex64) -> f64 {
    2.0 * (u.exp() + q.norm_sqr() * (-u).exp())
}

/// Numeric `I + III/(1+K)` at every node.
pub fn weak_metric_numeric(forms: &GridField<NumericForms>, k: f64) -> GridField<RealForm2> {
    forms.map(|f| f.first.combine(1.0, &f.third, 1.0 / (1.0 + k)))
}

impl std::ops::Add for RealForm2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.combine(1.0, &o, 1.0)
    }
}

impl std::ops::Sub for RealForm2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.combine(1.0, &o, -1.0)
    }
}

impl std::ops::Mul<f64> for RealForm2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.combine(s, &self, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayDirection {
    /// Along the positive real axis.
    Axis,
    /// Along the diagonal `arg z = pi/4`, which reaches the corner of a
    /// centered square.
    Diagonal,
}

/// Trapezoidal length of the grid ray from the base point to the boundary
/// for the length element `sqrt(coef) |dz|`. Returns the length and the
/// `|z|` where the ray stops.
pub fn ray_length(coef: &GridField<f64>, direction: RayDirection) -> (f64, f64) {
    let g = *coef.grid();
    let (i0, j0) = g.base_point();
    let (di, dj, step) = match direction {
        RayDirection::Axis => (1, 0, g.h()),
        RayDirection::Diagonal => (1, 1, g.h() * std::f64::consts::SQRT_2),
    };
    let mut len = 0.0;
    let (mut i, mut j) = (i0, j0);
    while i + di < g.nx() && j + dj < g.ny() {
        let a = coef.get(i, j).sqrt();
        let b = coef.get(i + di, j + dj).sqrt();
        len += 0.5 * (a + b) * step;
        i += di;
        j += dj;
    }
    (len, g.z(i, j).norm())
}

/// Weak-metric length of the ray from the base point.
pub fn radial_weak_length(u: &MetricField, q: &QDiff, direction: RayDirection) -> (f64, f64) {
    ray_length(&weak_metric(u, q), direction)
}

/// Outcome of fitting a Lorentz transformation to `f(z) -> f(wz)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceFit {
    pub residual: f64,
    pub raw_residual: f64,
    pub matrix: [[f64; 4]; 4],
    pub det: f64,
    pub orthochronous: bool,
    pub samples: usize,
    pub warnings: Vec<String>,
}

/// Fits `rho` with `f(w z) = rho f(z)` for the `n_fold` rotation `w`, by least
/// squares followed by Minkowski Gram-Schmidt into O(1,3). Samples are the
/// diagnostic nodes whose rotated image stays in the grid; values at rotated
/// points are bilinearly interpolated.
pub fn equivariance_check(s: &SurfaceData, q: &QDiff, n_fold: usize) -> Result<EquivarianceFit> {
    if n_fold == 0 || !q.is_rotation_invariant(n_fold) {
        return Err(Error::NotInvariant { n_fold });
    }
    let g = *s.grid();
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / n_fold as f64);
    let mut pairs = Vec::new();
    for (i, j) in g.diagnostic_nodes() {
        let zr = g.z(i, j) * w;
        if let Some(fr) = s.f.interpolate(zr) {
            let a = mink_from_herm(&HermMatrix::from_c2x2(&s.f.get(i, j))).to_array();
            let b = mink_from_herm(&HermMatrix::from_c2x2(&fr)).to_array();
            pairs.push((Vector4::from(a), Vector4::from(b)));
        }
    }
    if pairs.len() < 4 {
        return Err(Error::InvalidGrid("too few rotated samples".into()));
    }
    let mut xx = Matrix4::zeros();
    let mut yx = Matrix4::zeros();
    for (x, y) in &pairs {
        xx += x * x.transpose();
        yx += y * x.transpose();
    }
    let raw = yx * xx.try_inverse().ok_or(Error::InvalidGrid("degenerate sample set".into()))?;
    let rho = lorentz_gram_schmidt(&raw);
    let fit = |m: &Matrix4<f64>| {
        pairs.iter().map(|(x, y)| (m * x - y).amax()).fold(0.0, f64::max)
    };
    let det = rho.determinant();
    let orthochronous = rho[(0, 0)] > 0.0;
    let mut warnings = Vec::new();
    if det < 0.0 || !orthochronous {
        warnings.push(format!(
            "fitted isometry outside SO+(1,3): det {det:.3}, rho_00 {:.3}",
            rho[(0, 0)]
        ));
    }
    let mut matrix = [[0.0; 4]; 4];
    for (r, row) in matrix.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = rho[(r, c)];
        }
    }
    Ok(EquivarianceFit {
        residual: fit(&rho),
        raw_residual: fit(&raw),
        matrix,
        det,
        orthochronous,
        samples: pairs.len(),
        warnings,
    })
}

/// Orthonormalizes columns for `eta = diag(-1, 1, 1, 1)`, timelike column first.
fn lorentz_gram_schmidt(m: &Matrix4<f64>) -> Matrix4<f64> {
    let eta = |a: &Vector4<f64>, b: &Vector4<f64>| -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
    let mut cols: Vec<Vector4<f64>> = (0..4).map(|c| m.column(c).into_owned()).collect();
    for c in 0..4 {
        for p in 0..c {
            let sign = if p == 0 { -1.0 } else { 1.0 };
            let proj = eta(&cols[c], &cols[p]) * sign;
            let prev = cols[p];
            cols[c] -= prev * proj;
        }
        let nrm = eta(&cols[c], &cols[c]).abs().sqrt();
        if nrm > 0.0 {
            cols[c] /= nrm;
        }
    }
    Matrix4::from_columns(&cols)
}

/// Max and RMS of a scalar over the diagnostic nodes.
pub fn diag_norm(field: &GridField<f64>) -> NormPair {
    NormPair::over(field.grid().diagnostic_nodes().map(|(i, j)| field.get(i, j)))
}

/// Max and RMS over the core nodes, where refinement rates are read off.
pub fn core_norm(field: &GridField<f64>) -> NormPair {
    NormPair::over(field.grid().core_nodes().map(|(i, j)| field.get(i, j)))
}
