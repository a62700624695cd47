//! Complex 2x2 matrices, the ambient algebra for SL(2,C), su(1,1), su(2)
//! and the Hermitian model of Minkowski space.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major complex 2x2 matrix `[[a11, a12], [a21, a22]]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct C2x2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl C2x2 {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, b)
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn from_entries(e: [Complex64; 4]) -> Self {
        Self::new(e[0], e[1], e[2], e[3])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Plain (non-conjugating) transpose.
    pub fn transpose(&self) -> Self {
        Self::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.a11.conj(), self.a12.conj(), self.a21.conj(), self.a22.conj())
    }

    /// Hermitian conjugate `A* = conj(A)^t`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    /// Classical adjugate; `A adj(A) = det(A) id`.
    pub fn adjugate(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(self.adjugate().scale(d.inv()))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn diagonal_part(&self) -> Self {
        Self::diag(self.a11, self.a22)
    }

    pub fn off_diagonal_part(&self) -> Self {
        Self::new(ZERO, self.a12, self.a21, ZERO)
    }

    pub fn frobenius(&self) -> f64 {
        (self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr())
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Divide by the principal square root of the determinant, returning the
    /// rescaled matrix and `|det - 1|` before rescaling.
    pub fn normalize_det(&self) -> (Self, f64) {
        let d = self.det();
        (self.scale(d.sqrt().inv()), (d - ONE).norm())
    }

    /// Matrix exponential from the Cayley-Hamilton closed form
    /// `exp(A) = e^{tr/2} (cosh s id + sinh(s)/s (A - tr/2 id))`, `s^2 = -det(A - tr/2 id)`.
    pub fn exp(&self) -> Self {
        let half_tr = self.trace() * 0.5;
        let b = *self - Self::identity().scale(half_tr);
        let s = (-b.det()).sqrt();
        let sinhc = if s.norm() < 1e-8 {
            ONE + s * s / 6.0
        } else {
            s.sinh() / s
        };
        (Self::identity().scale(s.cosh()) + b.scale(sinhc)).scale(half_tr.exp())
    }
}

impl Add for C2x2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl AddAssign for C2x2 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for C2x2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for C2x2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

impl Mul for C2x2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<Complex64> for C2x2 {
    type Output = Self;
    fn mul(self, s: Complex64) -> Self {
        self.scale(s)
    }
}

impl Mul<f64> for C2x2 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale_re(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn adjugate_gives_inverse() {
        let a = C2x2::new(c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(-2.0, 0.25));
        let inv = a.inverse().unwrap();
        assert!((a * inv - C2x2::identity()).frobenius() < 1e-14);
    }

    #[test]
    fn exp_of_nilpotent_is_linear() {
        let n = C2x2::new(ZERO, c(2.0, 1.0), ZERO, ZERO);
        assert!((n.exp() - (C2x2::identity() + n)).frobenius() < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let d = C2x2::diag(c(0.3, 0.1), c(-0.3, -0.1));
        let e = d.exp();
        assert!((e.a11 - c(0.3, 0.1).exp()).norm() < 1e-14);
        assert!((e.a22 - c(-0.3, -0.1).exp()).norm() < 1e-14);
        assert!(e.a12.norm() < 1e-15 && e.a21.norm() < 1e-15);
    }

    #[test]
    fn normalize_det_reports_drift() {
        let m = C2x2::identity().scale_re(1.1);
        let (n, drift) = m.normalize_det();
        assert!((drift - 0.21).abs() < 1e-14);
        assert!((n.det() - ONE).norm() < 1e-15);
    }
}
