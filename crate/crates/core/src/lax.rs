//! The spectral family of Maurer-Cartan forms `U dz + V dzbar` attached to a
//! solution of the Gauss equation, with flatness and reality diagnostics.

use num_complex::Complex64;

use crate::cmat::{C2x2, ZERO};
use crate::error::{Error, Result};
use crate::gauss::{AnalyticMetric, MetricField};
use crate::grid::{Grid, GridField};
use crate::minkowski::{E1, E2_HAT, E3_HAT};
use crate::quadratic::QDiff;

/// `du = (u_x - i u_y)/2` at every node together with `X = (1+sigma)/2` and
/// `Y = (1-sigma)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeField {
    du: GridField<Complex64>,
    dbar_mismatch: f64,
    x: f64,
    y: f64,
}

impl DerivativeField {
    /// Exact derivatives for closed-form metrics, finite differences otherwise.
    pub fn from_metric(u: &MetricField) -> Self {
        let g = *u.grid();
        let (du, mismatch) = match u.analytic() {
            Some(a) => (GridField::from_fn(g, |_, _, z| a.du(z)), 0.0),
            None => {
                let uc = u.field().to_complex();
                let du = GridField::from_fn(g, |i, j, _| uc.wirtinger(i, j));
                let mismatch = g
                    .nodes()
                    .map(|(i, j)| (du.get(i, j).conj() - uc.wirtinger_bar(i, j)).norm())
                    .fold(0.0, f64::max);
                (du, mismatch)
            }
        };
        let s = u.sigma();
        Self {
            du,
            dbar_mismatch: mismatch,
            x: 0.5 * (1.0 + s),
            y: 0.5 * (1.0 - s),
        }
    }

    pub fn du(&self) -> &GridField<Complex64> {
        &self.du
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Largest `|conj(du) - dbar u|` seen when differencing.
    pub fn dbar_mismatch(&self) -> f64 {
        self.dbar_mismatch
    }
}

/// `p = (-dbar Q + e^-u Q conj(dbar Q)) / (2(e^u - |Q|^2 e^-u))` from sampled
/// `Q`, with `d conj(Q) = conj(dbar Q)`.
pub fn compute_p(u: &GridField<f64>, q: &GridField<Complex64>) -> Result<GridField<Complex64>> {
    let g = *u.grid();
    let mut p = GridField::constant(g, ZERO);
    for (i, j) in g.nodes() {
        let (v, qv) = (u.get(i, j), q.get(i, j));
        let den = 2.0 * (v.exp() - qv.norm_sqr() * (-v).exp());
        if !(den > 0.0) {
            return Err(Error::DegenerateDenominator { node: (i, j) });
        }
        let qb = q.wirtinger_bar(i, j);
        p.set(i, j, (-qb + qv * qb.conj() * (-v).exp()) / den);
    }
    Ok(p)
}

/// The Lax pair at one point.
#[allow(clippy::too_many_arguments)]
pub fn lax_pair_at(
    u: f64,
    du: Complex64,
    q: Complex64,
    p: Complex64,
    x: f64,
    y: f64,
    lambda: Complex64,
) -> (C2x2, C2x2) {
    let (eh, emh) = ((0.5 * u).exp(), (-0.5 * u).exp());
    let a = du * 0.25 + p;
    let uu = E1 * a + (E2_HAT * eh + E3_HAT * (q * emh)) * (lambda.inv() * x);
    let vv = E1 * (-a.conj()) + (E2_HAT * (q.conj() * emh) + E3_HAT * eh) * (lambda * y);
    (uu, vv)
}

/// Where the coefficients came from; closed forms are evaluated exactly at
/// RK4 midpoints.
#[derive(Clone, Debug, PartialEq)]
enum Source {
    Sampled,
    Seed {
        metric: AnalyticMetric,
        q: QDiff,
        x: f64,
        y: f64,
    },
    Constant {
        u: C2x2,
        v: C2x2,
    },
}

/// `U`, `V` sampled on a grid for one spectral parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct MaurerCartanData {
    lambda: Complex64,
    u: GridField<C2x2>,
    v: GridField<C2x2>,
    constant_curvature: bool,
    source: Source,
}

fn check_lambda(lambda: Complex64) -> Result<()> {
    if lambda.norm() == 0.0 || !lambda.is_finite() {
        Err(Error::ZeroLambda)
    } else {
        Ok(())
    }
}

/// Constant curvature form (`p = 0`) with the curvature's own `sigma`.
pub fn build_uv(
    u: &MetricField,
    du: &DerivativeField,
    q: &QDiff,
    lambda: Complex64,
) -> Result<MaurerCartanData> {
    build_uv_with(u, du, q, lambda, du.x(), du.y())
}

/// As [`build_uv`] but with explicit `X`, `Y`; used for the signed `sigma` of
/// the converse construction.
pub fn build_uv_with(
    u: &MetricField,
    du: &DerivativeField,
    q: &QDiff,
    lambda: Complex64,
    x: f64,
    y: f64,
) -> Result<MaurerCartanData> {
    check_lambda(lambda)?;
    let g = *u.grid();
    let mut uu = GridField::constant(g, C2x2::zero());
    let mut vv = uu.clone();
    for (i, j) in g.nodes() {
        let (a, b) = lax_pair_at(u.u(i, j), du.du().get(i, j), q.value(g.z(i, j)), ZERO, x, y, lambda);
        uu.set(i, j, a);
        vv.set(i, j, b);
    }
    let source = match u.analytic() {
        Some(metric) => Source::Seed { metric, q: q.clone(), x, y },
        None => Source::Sampled,
    };
    Ok(MaurerCartanData { lambda, u: uu, v: vv, constant_curvature: true, source })
}

/// General form from sampled (not necessarily holomorphic) `Q` and the
/// matching `p`.
pub fn build_uv_general(
    u: &MetricField,
    du: &DerivativeField,
    q: &GridField<Complex64>,
    p: &GridField<Complex64>,
    lambda: Complex64,
) -> Result<MaurerCartanData> {
    check_lambda(lambda)?;
    let g = *u.grid();
    let mut uu = GridField::constant(g, C2x2::zero());
    let mut vv = uu.clone();
    for (i, j) in g.nodes() {
        let (a, b) = lax_pair_at(
            u.u(i, j),
            du.du().get(i, j),
            q.get(i, j),
            p.get(i, j),
            du.x(),
            du.y(),
            lambda,
        );
        uu.set(i, j, a);
        vv.set(i, j, b);
    }
    Ok(MaurerCartanData { lambda, u: uu, v: vv, constant_curvature: false, source: Source::Sampled })
}

impl MaurerCartanData {
    /// The same `U`, `V` at every node.
    pub fn constant(grid: Grid, u: C2x2, v: C2x2, lambda: Complex64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            u: GridField::constant(grid, u),
            v: GridField::constant(grid, v),
            constant_curvature: true,
            source: Source::Constant { u, v },
        })
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn is_constant_curvature(&self) -> bool {
        self.constant_curvature
    }

    pub fn u(&self) -> &GridField<C2x2> {
        &self.u
    }

    pub fn v(&self) -> &GridField<C2x2> {
        &self.v
    }

    /// `(U, V)` at an arbitrary point, when a closed form is known.
    pub fn exact_at(&self, z: Complex64) -> Option<(C2x2, C2x2)> {
        match &self.source {
            Source::Sampled => None,
            Source::Constant { u, v } => Some((*u, *v)),
            Source::Seed { metric, q, x, y } => {
                Some(lax_pair_at(metric.u(z), metric.du(z), q.value(z), ZERO, *x, *y, self.lambda))
            }
        }
    }

    /// `dPsi/dx = Psi A_x` and `dPsi/dy = Psi A_y` with `A_x = U + V`,
    /// `A_y = i(U - V)`.
    pub fn alpha_x(&self, i: usize, j: usize) -> C2x2 {
        self.u.get(i, j) + self.v.get(i, j)
    }

    pub fn alpha_y(&self, i: usize, j: usize) -> C2x2 {
        (self.u.get(i, j) - self.v.get(i, j)) * crate::cmat::I
    }

    /// Largest `|tr U| + |tr V|`.
    pub fn trace_residual(&self) -> f64 {
        self.grid()
            .nodes()
            .map(|(i, j)| self.u.get(i, j).trace().norm() + self.v.get(i, j).trace().norm())
            .fold(0.0, f64::max)
    }
}

/// Largest `|Ad(e1) U(lambda) - U(-lambda)|` and the same for `V`, given data
/// built at `lambda` and `-lambda`.
pub fn twist_residual(at: &MaurerCartanData, at_neg: &MaurerCartanData) -> f64 {
    at.grid()
        .nodes()
        .map(|(i, j)| {
            let du = E1 * at.u.get(i, j) * E1 - at_neg.u.get(i, j);
            let dv = E1 * at.v.get(i, j) * E1 - at_neg.v.get(i, j);
            du.frobenius().max(dv.frobenius())
        })
        .fold(0.0, f64::max)
}

/// `|dbar U - d V + [V, U]|` at interior nodes, zero on the boundary ring.
pub fn zero_curvature_residual(mc: &MaurerCartanData) -> GridField<f64> {
    let g = *mc.grid();
    GridField::from_fn(g, |i, j, _| {
        if g.is_boundary(i, j) {
            return 0.0;
        }
        let (u, v) = (mc.u.get(i, j), mc.v.get(i, j));
        (mc.u.wirtinger_bar(i, j) - mc.v.wirtinger(i, j) + v.commutator(&u)).frobenius()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealForm {
    Su11,
    Su2,
}

/// Largest `|V + e1 U* e1|` (SU(1,1)) or `|V + U*|` (SU(2)) over all nodes.
pub fn reality_residual(mc: &MaurerCartanData, target: RealForm) -> f64 {
    mc.grid()
        .nodes()
        .map(|(i, j)| {
            let (u, v) = (mc.u.get(i, j), mc.v.get(i, j));
            let r = match target {
                RealForm::Su11 => v + E1 * u.adjoint() * E1,
                RealForm::Su2 => v + u.adjoint(),
            };
            r.frobenius()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::umbilic_seed;
    use crate::quadratic::QDomain;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn flat_data_at_unit_lambda() {
        let g = Grid::inscribed(0.8, 9).unwrap();
        let u = MetricField::from_analytic(g, -0.75, AnalyticMetric::Constant { u0: 0.0 }).unwrap();
        let du = DerivativeField::from_metric(&u);
        let mc = build_uv(&u, &du, &QDiff::zero(QDomain::UnitDisk), c(1.0, 0.0)).unwrap();
        let (uu, vv) = (mc.u().get(3, 4), mc.v().get(3, 4));
        assert!((uu - E2_HAT * 0.75).frobenius() < 1e-15);
        assert!((vv - E3_HAT * 0.25).frobenius() < 1e-15);
    }

    #[test]
    fn lambda_scales_off_diagonal_only() {
        let g = Grid::inscribed(0.8, 9).unwrap();
        let u = umbilic_seed(-0.75, &g).unwrap();
        let du = DerivativeField::from_metric(&u);
        let q = QDiff::monomial(c(0.1, 0.0), 1, QDomain::UnitDisk);
        let a = build_uv(&u, &du, &q, c(1.0, 0.0)).unwrap();
        let b = build_uv(&u, &du, &q, c(0.0, 1.0)).unwrap();
        let n = build_uv(&u, &du, &q, c(-1.0, 0.0)).unwrap();
        for (i, j) in g.nodes() {
            let (ua, ub) = (a.u().get(i, j), b.u().get(i, j));
            assert_eq!(ua.diagonal_part(), ub.diagonal_part());
            assert!((ua.off_diagonal_part() * c(0.0, -1.0) - ub.off_diagonal_part()).frobenius() < 1e-15);
        }
        assert_eq!(twist_residual(&a, &n), 0.0);
        assert!(a.trace_residual() < 1e-13);
        assert!(matches!(build_uv(&u, &du, &q, c(0.0, 0.0)), Err(Error::ZeroLambda)));
    }

    #[test]
    fn p_examples() {
        let g = Grid::centered_square(0.5, 9).unwrap();
        let zero = GridField::constant(g, 0.0);
        let qbar = GridField::from_fn(g, |_, _, z| z.conj());
        let p = compute_p(&zero, &qbar).unwrap();
        let (i0, j0) = g.base_point();
        assert!((p.get(i0, j0) - c(-0.5, 0.0)).norm() < 1e-12);
        let p_half = p.get(g.nx() - 1, j0);
        assert!((p_half - c(-1.0 / 3.0, 0.0)).norm() < 1e-12);
        let holo = GridField::from_fn(g, |_, _, z| z * z * 0.3);
        let p = compute_p(&zero, &holo).unwrap();
        assert!(p.values().iter().all(|v| v.norm() < 1e-13));
    }

    #[test]
    fn reality_at_special_modulus() {
        let g = Grid::inscribed(0.8, 17).unwrap();
        let u = umbilic_seed(-0.75, &g).unwrap();
        let du = DerivativeField::from_metric(&u);
        let q = QDiff::monomial(c(0.1, 0.0), 1, QDomain::UnitDisk);
        let at = |l| build_uv(&u, &du, &q, l).unwrap();
        assert!(reality_residual(&at(c(3.0_f64.sqrt(), 0.0)), RealForm::Su11) < 1e-12);
        assert!(reality_residual(&at(c(1.0, 0.0)), RealForm::Su11) > 1e-2);
    }
}
