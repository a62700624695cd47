//! Lagrangian and Legendrian Gauss maps. At the special spectral parameter
//! `lambda0` the frame is SU(1,1)- or SU(2)-valued and the Lagrangian Gauss map
//! becomes a harmonic map into H^2 or S^2; conversely a harmonic map and a
//! choice of `lambda1` produce constant curvature data.

use num_complex::Complex64;

use crate::cmat::{C2x2, I, ZERO};
use crate::error::{Error, Result};
use crate::frame::{frame_unitarity_residual, FrameField};
use crate::gauss::{
    check_curvature, gauss_residual_raw, newton, AnalyticMetric, BoundaryData, MetricField,
    SolveStats,
};
use crate::grid::{Grid, GridField};
use crate::lax::{lax_pair_at, MaurerCartanData, RealForm};
use crate::minkowski::{su11_disk, su11_pairing, su2_pairing, su2_sphere, E1, ORBIT_TOL};
use crate::quadratic::QDiff;
use crate::surface::{fundamental_forms_numeric, SurfaceData};

/// `|lambda0|` for curvature `K`: `exp(arcosh sqrt(-1/K))` when `-1 < K < 0`
/// and `exp(arsinh sqrt(1/K))` when `K > 0`. Both agree with
/// `sqrt((1+sigma)/|1-sigma|) = (1+sigma)/sqrt|K|`, which is asserted.
pub fn lambda0(k: f64) -> Result<f64> {
    check_curvature("gauss_maps", k)?;
    let sigma = (1.0 + k).sqrt();
    let hyperbolic = if k < 0.0 {
        (-1.0 / k).sqrt().acosh().exp()
    } else {
        (1.0 / k).sqrt().asinh().exp()
    };
    // 1 - sigma = -K/(1 + sigma) avoids cancellation for small |K|.
    let ratio = ((1.0 + sigma) / (k.abs() / (1.0 + sigma))).sqrt();
    assert!(
        (hyperbolic - ratio).abs() <= 1e-12 * ratio,
        "lambda0 formulas disagree for K = {k}: {hyperbolic} vs {ratio}"
    );
    Ok(ratio)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapTarget {
    Generic,
    H2,
    S2,
}

/// `L = i Psi e1 Psi^-1` with its projection to the disk or sphere when the
/// frame takes values in the matching real form.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianMapField {
    l: GridField<C2x2>,
    lambda: Complex64,
    target: MapTarget,
    disk: Option<GridField<Complex64>>,
    sphere: Option<GridField<[f64; 3]>>,
    unitarity: f64,
}

impl LagrangianMapField {
    pub fn l(&self) -> &GridField<C2x2> {
        &self.l
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn target(&self) -> MapTarget {
        self.target
    }

    pub fn disk(&self) -> Option<&GridField<Complex64>> {
        self.disk.as_ref()
    }

    pub fn sphere(&self) -> Option<&GridField<[f64; 3]>> {
        self.sphere.as_ref()
    }

    /// Unitarity residual of the frame in the chosen real form (0 for
    /// generic maps).
    pub fn unitarity(&self) -> f64 {
        self.unitarity
    }

    /// Largest `|L^2 + id|` and `|tr L|`.
    pub fn algebraic_residual(&self) -> f64 {
        self.l
            .values()
            .iter()
            .map(|l| ((*l * *l + C2x2::identity()).frobenius()).max(l.trace().norm()))
            .fold(0.0, f64::max)
    }

    /// Largest `|<L, L> + 1|` in the Killing pairing of the target.
    pub fn orbit_residual(&self) -> f64 {
        let pair = match self.target {
            MapTarget::S2 => su2_pairing,
            _ => su11_pairing,
        };
        let expected = if self.target == MapTarget::S2 { 1.0 } else { -1.0 };
        self.l
            .values()
            .iter()
            .map(|l| (pair(l, l) - expected).norm())
            .fold(0.0, f64::max)
    }
}

pub fn lagrangian_map(psi: &FrameField) -> Result<LagrangianMapField> {
    let g = *psi.grid();
    let l = GridField::from_fn(g, |i, j, _| {
        let p = psi.get(i, j);
        p * E1 * p.adjugate() * I
    });
    let su11 = frame_unitarity_residual(psi, RealForm::Su11);
    let su2 = frame_unitarity_residual(psi, RealForm::Su2);
    let mut out = LagrangianMapField {
        l,
        lambda: psi.lambda(),
        target: MapTarget::Generic,
        disk: None,
        sphere: None,
        unitarity: 0.0,
    };
    if su11 <= ORBIT_TOL {
        let mut w = GridField::constant(g, ZERO);
        for (i, j) in g.nodes() {
            w.set(i, j, su11_disk(&out.l.get(i, j))?);
        }
        out.target = MapTarget::H2;
        out.disk = Some(w);
        out.unitarity = su11;
    } else if su2 <= ORBIT_TOL {
        let mut s = GridField::constant(g, [0.0; 3]);
        for (i, j) in g.nodes() {
            s.set(i, j, su2_sphere(&out.l.get(i, j))?);
        }
        out.target = MapTarget::S2;
        out.sphere = Some(s);
        out.unitarity = su2;
    }
    Ok(out)
}

/// Jacobian determinant of `z -> w(z)` at the diagnostic nodes; a local
/// diffeomorphism keeps it away from zero with one sign.
pub fn disk_jacobian(w: &GridField<Complex64>) -> GridField<f64> {
    let g = *w.grid();
    GridField::from_fn(g, |i, j, _| {
        let (wx, wy) = (w.dx(i, j), w.dy(i, j));
        wx.re * wy.im - wy.re * wx.im
    })
}

/// Jacobian of a sphere-valued map, measured as `s . (s_x x s_y)`.
pub fn sphere_jacobian(s: &GridField<[f64; 3]>) -> GridField<f64> {
    let g = *s.grid();
    let comp = |c: usize| GridField::from_fn(g, |i, j, _| s.get(i, j)[c]);
    let (a, b, c) = (comp(0), comp(1), comp(2));
    GridField::from_fn(g, |i, j, _| {
        let sx = [a.dx(i, j), b.dx(i, j), c.dx(i, j)];
        let sy = [a.dy(i, j), b.dy(i, j), c.dy(i, j)];
        let cross = [
            sx[1] * sy[2] - sx[2] * sy[1],
            sx[2] * sy[0] - sx[0] * sy[2],
            sx[0] * sy[1] - sx[1] * sy[0],
        ];
        let p = s.get(i, j);
        p[0] * cross[0] + p[1] * cross[1] + p[2] * cross[2]
    })
}

/// Numeric energy pairings against their closed forms, per node (zero on
/// the boundary ring).
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    /// `|<dL, dL> + K e^{-2i theta} Q|`.
    pub hopf: GridField<f64>,
    /// `|<dL, dbar L> -+ K (e^u + |Q|^2 e^-u)/2|`.
    pub dirichlet: GridField<f64>,
    /// Smallest `|<dL, dL>| / (|K| |Q|)` over diagnostic nodes with
    /// `|Q| > 1e-3`, or 1 if there are none.
    pub min_conformality_ratio: f64,
}

/// Checks `<dL, dL> = -K e^{-2i theta} Q` and
/// `<dL, dbar L> = -K (e^u + |Q|^2 e^-u)/2` (H^2, pairing `tr/2`) or
/// `+K (...)/2` (S^2, pairing `-tr/2`).
pub fn energy_check(
    map: &LagrangianMapField,
    u: &MetricField,
    q: &QDiff,
    theta: f64,
) -> Result<EnergyReport> {
    let (pair, sign): (fn(&C2x2, &C2x2) -> Complex64, f64) = match map.target {
        MapTarget::H2 => (su11_pairing, -1.0),
        MapTarget::S2 => (su2_pairing, 1.0),
        MapTarget::Generic => {
            return Err(Error::NotOnOrbit {
                reason: "energy check needs an H2 or S2 valued map".into(),
            })
        }
    };
    let k = u.k();
    let g = *u.grid();
    let phase = Complex64::from_polar(1.0, -2.0 * theta);
    let mut hopf = GridField::constant(g, 0.0);
    let mut dir = GridField::constant(g, 0.0);
    for (i, j) in g.interior() {
        let dl = map.l.wirtinger(i, j);
        let dbl = map.l.wirtinger_bar(i, j);
        let qv = q.value(g.z(i, j));
        let uv = u.u(i, j);
        hopf.set(i, j, (pair(&dl, &dl) + phase * qv * k).norm());
        let expected = sign * k * 0.5 * (uv.exp() + qv.norm_sqr() * (-uv).exp());
        dir.set(i, j, (pair(&dl, &dbl) - expected).norm());
    }
    let mut ratio = f64::INFINITY;
    for (i, j) in g.diagnostic_nodes() {
        let qv = q.value(g.z(i, j));
        if qv.norm() > 1e-3 {
            let dl = map.l.wirtinger(i, j);
            ratio = ratio.min(pair(&dl, &dl).norm() / (k.abs() * qv.norm()));
        }
    }
    Ok(EnergyReport {
        hopf,
        dirichlet: dir,
        min_conformality_ratio: if ratio.is_finite() { ratio } else { 1.0 },
    })
}

/// Discrete harmonic-map residual of the Maurer-Cartan form.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicityReport {
    /// `|d(*alpha_p) + [alpha ^ *alpha_p]|` at each node (zero on the
    /// boundary ring), with `alpha_p` the off-diagonal part.
    pub two_form: GridField<f64>,
    /// Largest off-diagonal part of `[alpha'_p, alpha''_p]`.
    pub wedge: f64,
}

pub fn harmonicity_residual(mc: &MaurerCartanData) -> HarmonicityReport {
    let g = *mc.grid();
    let ax = GridField::from_fn(g, |i, j, _| mc.alpha_x(i, j));
    let ay = GridField::from_fn(g, |i, j, _| mc.alpha_y(i, j));
    let px = ax.map(|a| a.off_diagonal_part());
    let py = ay.map(|a| a.off_diagonal_part());
    let two_form = GridField::from_fn(g, |i, j, _| {
        if g.is_boundary(i, j) {
            return 0.0;
        }
        let r = px.dx(i, j) + py.dy(i, j)
            + ax.get(i, j).commutator(&px.get(i, j))
            + ay.get(i, j).commutator(&py.get(i, j));
        r.frobenius()
    });
    let wedge = g
        .nodes()
        .map(|(i, j)| {
            let (u, v) = (mc.u().get(i, j), mc.v().get(i, j));
            u.off_diagonal_part()
                .commutator(&v.off_diagonal_part())
                .off_diagonal_part()
                .frobenius()
        })
        .fold(0.0, f64::max);
    HarmonicityReport { two_form, wedge }
}

/// `(f, n)` with the tangency residual `|<df, n>|`.
#[derive(Clone, Debug, PartialEq)]
pub struct LegendrianMapField {
    pub f: GridField<C2x2>,
    pub n: GridField<C2x2>,
    pub tangency: GridField<f64>,
}

pub fn legendrian_map(s: &SurfaceData) -> LegendrianMapField {
    let forms = fundamental_forms_numeric(s);
    LegendrianMapField {
        f: s.f().clone(),
        n: s.n().clone(),
        tangency: forms.map(|f| f.tangency.norm()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedTarget {
    H2,
    S2,
}

impl SeedTarget {
    /// Curvature of the normalized Gauss equation the seed satisfies.
    pub fn normalized_curvature(self) -> f64 {
        match self {
            SeedTarget::H2 => -1.0,
            SeedTarget::S2 => 1.0,
        }
    }
}

/// Harmonic-map data `(u_hat, Q_hat)`: a solution of
/// `(1/4) Lap u + (k/2)(e^u - |Q|^2 e^-u) = 0` with `k = -1` (H^2) or `k = 1`
/// (S^2).
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicSeed {
    u: GridField<f64>,
    analytic: Option<AnalyticMetric>,
    q: QDiff,
    target: SeedTarget,
}

impl HarmonicSeed {
    /// `Q_hat = 0` with `e^u = 4 (1 -+ |z|^2)^-2`.
    pub fn umbilic(grid: &Grid, target: SeedTarget, domain: crate::quadratic::QDomain) -> Result<Self> {
        let a = match target {
            SeedTarget::H2 => {
                grid.check_inside_unit_disk()?;
                AnalyticMetric::Disk { scale: 4.0 }
            }
            SeedTarget::S2 => AnalyticMetric::Sphere { scale: 4.0 },
        };
        Ok(Self {
            u: GridField::from_fn(*grid, |_, _, z| a.u(z)),
            analytic: Some(a),
            q: QDiff::zero(domain),
            target,
        })
    }

    /// Solves the normalized equation for `Q_hat`. Boundary data is
    /// `log(e^{u0} + |Q_hat|)` with `u0` the umbilic seed of the target.
    pub fn solve(q: QDiff, grid: &Grid, target: SeedTarget) -> Result<(Self, SolveStats)> {
        let k = target.normalized_curvature();
        let bc = match target {
            SeedTarget::H2 => BoundaryData::heuristic_unchecked(&q, k, grid)?,
            SeedTarget::S2 => BoundaryData::from_fn(grid, |z| {
                (4.0 / (1.0 + z.norm_sqr()).powi(2) + q.value(z).norm()).ln()
            }),
        };
        let (u, stats) = newton(bc.values().clone(), k, &q.abs2_samples(grid))?;
        Ok((Self { u, analytic: None, q, target }, stats))
    }

    pub fn u(&self) -> &GridField<f64> {
        &self.u
    }

    pub fn q(&self) -> &QDiff {
        &self.q
    }

    pub fn target(&self) -> SeedTarget {
        self.target
    }

    /// Residual of the normalized equation at interior nodes.
    pub fn residual(&self) -> GridField<f64> {
        gauss_residual_raw(&self.u, self.target.normalized_curvature(), &self.q.abs2_samples(self.u.grid()))
    }

    /// Non-conformality `|Q_hat| < e^u_hat` fails at this node, if anywhere.
    pub fn conformal_node(&self) -> Option<(usize, usize)> {
        let g = *self.u.grid();
        let bad = g.nodes().find(|&(i, j)| !(self.q.value(g.z(i, j)).norm() < self.u.get(i, j).exp()));
        bad
    }

    /// The seed's own Lax pair: `X = 1/2`, `Y = +-1/2`, at spectral parameter `mu`.
    pub fn lax_at(&self, i: usize, j: usize, du: Complex64, mu: Complex64) -> (C2x2, C2x2) {
        let y = match self.target {
            SeedTarget::H2 => 0.5,
            SeedTarget::S2 => -0.5,
        };
        lax_pair_at(self.u.get(i, j), du, self.q.value(self.u.grid().z(i, j)), ZERO, 0.5, y, mu)
    }
}

/// Constant curvature data produced from a harmonic seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ConverseData {
    pub u: MetricField,
    pub q: QDiff,
    pub k: f64,
    /// `(1 +- |lambda1|^2) / (2 |lambda1|)`.
    pub factor: f64,
    /// `|lambda0(K) - |lambda1||`.
    pub roundtrip_error: f64,
}

/// `e^{u/2} = |c| e^{u_hat/2}`, `Q = c^2 Q_hat` with
/// `c = (1 + |lambda1|^2)/(2|lambda1|)`, `K = -1/c^2` for H^2 and
/// `c = (1 - |lambda1|^2)/(2|lambda1|)`, `K = 1/c^2` for S^2.
pub fn converse_rescale(seed: &HarmonicSeed, lambda1: Complex64) -> Result<ConverseData> {
    let r = lambda1.norm();
    if (r - 1.0).abs() <= 1e-12 {
        return Err(Error::OnUnitCircle { modulus: r });
    }
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::validation("lambda1", format!("|lambda1| = {r} must exceed 1")));
    }
    let (c, k) = converse_curvature(r, seed.target);
    let shift = 2.0 * c.abs().ln();
    let q = QDiff::new(seed.q.coeffs().iter().map(|a| a * (c * c)).collect(), seed.q.domain());
    let u = MetricField::unchecked(seed.u.map(|v| v + shift), k, seed.analytic.map(|a| a.shifted(shift)));
    let l0 = lambda0(k)?;
    let roundtrip_error = (l0 - r).abs();
    assert!(
        roundtrip_error <= 1e-12 * r,
        "lambda0(K) = {l0} does not return |lambda1| = {r}"
    );
    Ok(ConverseData { u, q, k, factor: c, roundtrip_error })
}

/// `(c, K)` for a given `|lambda1| > 1`.
pub fn converse_curvature(r: f64, target: SeedTarget) -> (f64, f64) {
    match target {
        SeedTarget::H2 => {
            let c = (1.0 + r * r) / (2.0 * r);
            (c, -1.0 / (c * c))
        }
        SeedTarget::S2 => {
            let c = (1.0 - r * r) / (2.0 * r);
            (c, 1.0 / (c * c))
        }
    }
}

/// Largest difference between the rescaled data's Lax pair at `lambda1` and
/// the seed's own pair at `lambda1/|lambda1|`; the two coincide identically.
pub fn converse_connection_residual(
    seed: &HarmonicSeed,
    data: &ConverseData,
    du: &GridField<Complex64>,
    lambda1: Complex64,
) -> f64 {
    let g = *seed.u.grid();
    let sigma = data.u.sigma();
    let (x, y) = (0.5 * (1.0 + sigma), 0.5 * (1.0 - sigma));
    let mu = lambda1 / lambda1.norm();
    g.nodes()
        .map(|(i, j)| {
            let z = g.z(i, j);
            let (a, b) = lax_pair_at(data.u.u(i, j), du.get(i, j), data.q.value(z), ZERO, x, y, lambda1);
            let (c, d) = seed.lax_at(i, j, du.get(i, j), mu);
            (a - c).frobenius().max((b - d).frobenius())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::QDomain;

    #[test]
    fn lambda0_examples() {
        assert!((lambda0(-0.75).unwrap() - 3.0_f64.sqrt()).abs() < 1e-14);
        assert!((lambda0(3.0).unwrap() - 3.0_f64.sqrt()).abs() < 1e-14);
        assert!((lambda0(-0.5).unwrap() - (1.0 + 2.0_f64.sqrt())).abs() < 1e-14);
        assert!(lambda0(-1.0).is_err());
        assert!(lambda0(0.0).is_err());
    }

    #[test]
    fn converse_examples() {
        let g = Grid::inscribed(0.8, 9).unwrap();
        let s3 = Complex64::new(3.0_f64.sqrt(), 0.0);
        let h = HarmonicSeed::umbilic(&g, SeedTarget::H2, QDomain::UnitDisk).unwrap();
        let d = converse_rescale(&h, s3).unwrap();
        assert!((d.factor - 2.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((d.k + 0.75).abs() < 1e-15);
        let s = HarmonicSeed::umbilic(&g, SeedTarget::S2, QDomain::UnitDisk).unwrap();
        let d = converse_rescale(&s, s3).unwrap();
        assert!((d.factor.abs() - 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((d.k - 3.0).abs() < 1e-13);
        assert!(matches!(
            converse_rescale(&h, Complex64::new(0.0, 1.0)),
            Err(Error::OnUnitCircle { .. })
        ));
    }
}
