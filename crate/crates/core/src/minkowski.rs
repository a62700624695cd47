//! Hermitian 2x2 model of Minkowski space E^{1,3}, hyperbolic space H^3, and
//! the adjoint-orbit models of H^2 (in su(1,1)) and S^2 (in su(2)).
//!
//! A Minkowski vector `(x0, x1, x2, x3)` is identified with the Hermitian
//! matrix `x0 e0 + x1 e1 + x2 e2 + x3 e3`, where `e0` is the identity, `e1` is
//! `diag(1, -1)`, `e2 = [[0, -i], [i, 0]]` and `e3 = [[0, 1], [1, 0]]`. The
//! Lorentzian inner product is `<A, B> = -1/2 tr(A e2 B^t e2)`, so that
//! `<A, A> = -det A`.

use num_complex::Complex64;

use crate::cmat::{C2x2, I, ONE, ZERO};
use crate::error::{Error, Result};

/// Structural tolerance for hyperboloid and orbit membership tests.
pub const STRUCTURAL_TOL: f64 = 1e-8;
/// Orbit tolerance used by the H^2 and S^2 projections.
pub const ORBIT_TOL: f64 = 1e-6;

pub const E0: C2x2 = C2x2::new(ONE, ZERO, ZERO, ONE);
pub const E1: C2x2 = C2x2::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0));
pub const E2: C2x2 = C2x2::new(ZERO, Complex64::new(0.0, -1.0), I, ZERO);
pub const E3: C2x2 = C2x2::new(ZERO, ONE, ONE, ZERO);
/// Null vector `-(e2 - i e3)/2 = [[0, i], [0, 0]]`.
pub const E2_HAT: C2x2 = C2x2::new(ZERO, I, ZERO, ZERO);
/// Null vector `-(e2 + i e3)/2 = [[0, 0], [-i, 0]]`.
pub const E3_HAT: C2x2 = C2x2::new(ZERO, ZERO, Complex64::new(0.0, -1.0), ZERO);

/// The fixed matrices of the model, bundled for callers that want them by value.
#[derive(Clone, Copy, Debug)]
pub struct BasisConstants {
    pub e0: C2x2,
    pub e1: C2x2,
    pub e2: C2x2,
    pub e3: C2x2,
    pub e2_hat: C2x2,
    pub e3_hat: C2x2,
}

pub const BASIS: BasisConstants = BasisConstants {
    e0: E0,
    e1: E1,
    e2: E2,
    e3: E3,
    e2_hat: E2_HAT,
    e3_hat: E3_HAT,
};

/// Coordinates of a point of E^{1,3}.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct MinkVector {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MinkVector {
    pub const fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// `-x0^2 + x1^2 + x2^2 + x3^2`.
    pub fn minkowski_norm_sqr(&self) -> f64 {
        -self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3
    }

    pub fn euclidean_norm(&self) -> f64 {
        (self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }
}

/// A Hermitian 2x2 matrix. Hermiticity is structural: only `a11`, `a22`
/// (real) and `a12` are stored.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct HermMatrix {
    a11: f64,
    a22: f64,
    a12: Complex64,
}

impl HermMatrix {
    pub fn new(a11: f64, a22: f64, a12: Complex64) -> Self {
        Self { a11, a22, a12 }
    }

    /// Hermitian part `(A + A*)/2` of an arbitrary matrix.
    pub fn from_c2x2(a: &C2x2) -> Self {
        Self {
            a11: a.a11.re,
            a22: a.a22.re,
            a12: (a.a12 + a.a21.conj()) * 0.5,
        }
    }

    pub fn to_c2x2(&self) -> C2x2 {
        C2x2::new(
            Complex64::new(self.a11, 0.0),
            self.a12,
            self.a12.conj(),
            Complex64::new(self.a22, 0.0),
        )
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12.norm_sqr()
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn a11(&self) -> f64 {
        self.a11
    }

    pub fn a22(&self) -> f64 {
        self.a22
    }

    pub fn a12(&self) -> Complex64 {
        self.a12
    }
}

pub fn herm_from_mink(v: MinkVector) -> HermMatrix {
    HermMatrix {
        a11: v.x0 + v.x1,
        a22: v.x0 - v.x1,
        a12: Complex64::new(v.x3, -v.x2),
    }
}

pub fn mink_from_herm(a: &HermMatrix) -> MinkVector {
    MinkVector {
        x0: 0.5 * (a.a11 + a.a22),
        x1: 0.5 * (a.a11 - a.a22),
        x2: -a.a12.im,
        x3: a.a12.re,
    }
}

/// Complex-bilinear extension of the Lorentzian product to all of gl(2,C):
/// `-1/2 tr(A e2 B^t e2)`. Equivalently `-1/2 tr(A adj(B))`.
pub fn mink_inner_c(a: &C2x2, b: &C2x2) -> Complex64 {
    (*a * E2 * b.transpose() * E2).trace() * -0.5
}

pub fn mink_inner(a: &HermMatrix, b: &HermMatrix) -> f64 {
    mink_inner_c(&a.to_c2x2(), &b.to_c2x2()).re
}

/// Project a point of the hyperboloid model of H^3 to the Poincare ball.
pub fn to_poincare_ball(p: MinkVector) -> Result<[f64; 3]> {
    let residual = (p.minkowski_norm_sqr() + 1.0).abs();
    let scale = 1.0 + p.euclidean_norm().powi(2);
    if residual > STRUCTURAL_TOL * scale || p.x0 <= 0.0 {
        return Err(Error::NotOnHyperboloid { residual });
    }
    let d = 1.0 + p.x0;
    Ok([p.x1 / d, p.x2 / d, p.x3 / d])
}

/// Killing pairing on su(1,1): `<A, B> = 1/2 tr(AB)`.
pub fn su11_pairing(a: &C2x2, b: &C2x2) -> Complex64 {
    (*a * *b).trace() * 0.5
}

/// Killing pairing on su(2): `<A, B> = -1/2 tr(AB)`.
pub fn su2_pairing(a: &C2x2, b: &C2x2) -> Complex64 {
    (*a * *b).trace() * -0.5
}

fn orbit_err(reason: String) -> Error {
    Error::NotOnOrbit { reason }
}

fn check_real(name: &str, c: Complex64, tol: f64) -> Result<f64> {
    if c.im.abs() > tol {
        return Err(orbit_err(format!("{name} has imaginary part {:e}", c.im)));
    }
    Ok(c.re)
}

/// Project `L` on the orbit of `i e1` in su(1,1) (a model of H^2) to the
/// Poincare disk.
pub fn su11_disk(l: &C2x2) -> Result<Complex64> {
    let ie1 = E1.scale(I);
    let scale = 1.0 + l.frobenius().powi(2);
    let tol = ORBIT_TOL * scale;
    let x0 = check_real("x0", -su11_pairing(l, &ie1), tol)?;
    let x1 = check_real("x1", su11_pairing(l, &E2), tol)?;
    let x2 = check_real("x2", su11_pairing(l, &E3), tol)?;
    let rebuilt = ie1.scale_re(x0) + E2.scale_re(x1) + E3.scale_re(x2);
    let off_algebra = (rebuilt - *l).frobenius();
    if off_algebra > tol {
        return Err(orbit_err(format!("not in su(1,1), residual {off_algebra:e}")));
    }
    let orbit = (-x0 * x0 + x1 * x1 + x2 * x2 + 1.0).abs();
    if orbit > tol || x0 <= 0.0 {
        return Err(orbit_err(format!(
            "orbit residual {orbit:e} with x0 = {x0}"
        )));
    }
    Ok(Complex64::new(x1, x2) / (1.0 + x0))
}

/// Project `L` on the orbit of `i e1` in su(2) to the unit sphere.
pub fn su2_sphere(l: &C2x2) -> Result<[f64; 3]> {
    let scale = 1.0 + l.frobenius().powi(2);
    let tol = ORBIT_TOL * scale;
    let basis = [E1.scale(I), E2.scale(I), E3.scale(I)];
    let mut s = [0.0; 3];
    for (k, b) in basis.iter().enumerate() {
        s[k] = check_real("s", su2_pairing(l, b), tol)?;
    }
    let rebuilt = basis[0].scale_re(s[0]) + basis[1].scale_re(s[1]) + basis[2].scale_re(s[2]);
    let off_algebra = (rebuilt - *l).frobenius();
    if off_algebra > tol {
        return Err(orbit_err(format!("not in su(2), residual {off_algebra:e}")));
    }
    let orbit = (s[0] * s[0] + s[1] * s[1] + s[2] * s[2] - 1.0).abs();
    if orbit > tol {
        return Err(orbit_err(format!("orbit residual {orbit:e}")));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn herm_from_mink_examples() {
        let id = herm_from_mink(MinkVector::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(id.to_c2x2(), E0);
        assert_eq!(herm_from_mink(MinkVector::default()).to_c2x2(), C2x2::zero());
        let d = herm_from_mink(MinkVector::new(1.0, 1.0, 0.0, 0.0));
        assert_eq!(d, HermMatrix::new(2.0, 0.0, ZERO));
    }

    #[test]
    fn mink_from_herm_examples() {
        assert_eq!(
            mink_from_herm(&HermMatrix::from_c2x2(&E0)),
            MinkVector::new(1.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(
            mink_from_herm(&HermMatrix::from_c2x2(&E2)),
            MinkVector::new(0.0, 0.0, 1.0, 0.0)
        );
        assert_eq!(
            mink_from_herm(&HermMatrix::new(3.0, 1.0, ZERO)),
            MinkVector::new(2.0, 1.0, 0.0, 0.0)
        );
    }

    #[test]
    fn basis_is_orthonormal_with_lorentz_signature() {
        let basis = [E0, E1, E2, E3];
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let expect = match (i, j) {
                    (0, 0) => -1.0,
                    _ if i == j => 1.0,
                    _ => 0.0,
                };
                assert_eq!(mink_inner_c(a, b), Complex64::new(expect, 0.0), "({i},{j})");
            }
        }
    }

    #[test]
    fn null_basis() {
        assert_eq!(E3_HAT.adjoint(), E2_HAT);
        assert_eq!(mink_inner_c(&E2_HAT, &E2_HAT), ZERO);
        assert_eq!(mink_inner_c(&E3_HAT, &E3_HAT), ZERO);
        assert_eq!(mink_inner_c(&E2_HAT, &E3_HAT), Complex64::new(0.5, 0.0));
        // definitions as combinations of e2, e3
        assert_eq!((E2 - E3.scale(I)).scale_re(-0.5), E2_HAT);
        assert_eq!((E2 + E3.scale(I)).scale_re(-0.5), E3_HAT);
    }

    #[test]
    fn inner_examples() {
        let e0 = HermMatrix::from_c2x2(&E0);
        assert_eq!(mink_inner(&e0, &e0), -1.0);
    }

    #[test]
    fn poincare_ball_examples() {
        assert_eq!(
            to_poincare_ball(MinkVector::new(1.0, 0.0, 0.0, 0.0)).unwrap(),
            [0.0, 0.0, 0.0]
        );
        let t: f64 = 1.0;
        let b = to_poincare_ball(MinkVector::new(t.cosh(), t.sinh(), 0.0, 0.0)).unwrap();
        assert!(close(b[0], 0.46211715726000974, 1e-15));
        assert!(close(b[0], (0.5f64).tanh(), 1e-15));
        assert!(matches!(
            to_poincare_ball(MinkVector::new(0.9, 0.0, 0.0, 0.0)),
            Err(Error::NotOnHyperboloid { .. })
        ));
        // lower sheet is rejected
        assert!(to_poincare_ball(MinkVector::new(-1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn su11_disk_examples() {
        let ie1 = E1.scale(I);
        assert_eq!(su11_disk(&ie1).unwrap(), ZERO);
        let t: f64 = 1.0;
        let l = ie1.scale_re(t.cosh()) + E2.scale_re(t.sinh());
        let w = su11_disk(&l).unwrap();
        assert!(close(w.re, t.sinh() / (1.0 + t.cosh()), 1e-15));
        assert!(close(w.im, 0.0, 1e-15));
        assert!(matches!(su11_disk(&E2.scale(I)), Err(Error::NotOnOrbit { .. })));
        // lower sheet of the two-sheeted orbit
        assert!(su11_disk(&ie1.scale_re(-1.0)).is_err());
    }

    #[test]
    fn su2_sphere_examples() {
        assert_eq!(su2_sphere(&E1.scale(I)).unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(su2_sphere(&E2.scale(I)).unwrap(), [0.0, 1.0, 0.0]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = su2_sphere(&(E1.scale(I) + E2.scale(I)).scale_re(r)).unwrap();
        assert!(close(s[0], r, 1e-15) && close(s[1], r, 1e-15) && s[2] == 0.0);
        assert!(su2_sphere(&E1).is_err());
        assert!(su2_sphere(&E1.scale(I).scale_re(2.0)).is_err());
    }
}
