//! Holomorphic quadratic differentials `Q dz^2` with polynomial coefficients.

use num_complex::Complex64;

use crate::cmat::ZERO;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QDomain {
    UnitDisk,
    Plane,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QKind {
    Zero,
    Constant,
    Polynomial,
}

/// `Q(z) = a_0 + a_1 z + ... + a_d z^d` on the unit disk or the plane.
/// Trailing zero coefficients are dropped on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct QDiff {
    coeffs: Vec<Complex64>,
    domain: QDomain,
}

impl QDiff {
    pub fn new(mut coeffs: Vec<Complex64>, domain: QDomain) -> Self {
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Self { coeffs, domain }
    }

    pub fn zero(domain: QDomain) -> Self {
        Self::new(Vec::new(), domain)
    }

    pub fn constant(c: Complex64, domain: QDomain) -> Self {
        Self::new(vec![c], domain)
    }

    /// `Q(z) = c z^k`.
    pub fn monomial(c: Complex64, k: usize, domain: QDomain) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self::new(coeffs, domain)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn domain(&self) -> QDomain {
        self.domain
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn kind(&self) -> QKind {
        match self.coeffs.len() {
            0 => QKind::Zero,
            1 => QKind::Constant,
            _ => QKind::Polynomial,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kind() == QKind::Zero
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if self.domain == QDomain::UnitDisk && z.norm() >= 1.0 {
            return Err(Error::OutOfDomain { re: z.re, im: z.im });
        }
        Ok(())
    }

    pub fn eval_q(&self, z: Complex64) -> Result<Complex64> {
        self.check_domain(z)?;
        Ok(self.value(z))
    }

    pub fn eval_dq(&self, z: Complex64) -> Result<Complex64> {
        self.check_domain(z)?;
        Ok(self.derivative(z))
    }

    /// Horner evaluation without the domain check.
    pub fn value(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(ZERO, |acc, (k, &a)| acc * z + a * k as f64)
    }

    /// `max |Q| (1 - |z|^2)^2 / 4` over the grid nodes: `|Q|` measured in the
    /// hyperbolic metric of the disk.
    pub fn poincare_sup(&self, grid: &Grid) -> Result<f64> {
        if self.domain != QDomain::UnitDisk {
            return Err(Error::InvalidGrid(
                "poincare_sup needs a unit-disk differential".into(),
            ));
        }
        grid.check_inside_unit_disk()?;
        Ok(grid
            .nodes()
            .map(|(i, j)| {
                let z = grid.z(i, j);
                let w = 1.0 - z.norm_sqr();
                self.value(z).norm() * w * w / 4.0
            })
            .fold(0.0, f64::max))
    }

    /// Whether `Q(wz) w^2 = Q(z)` for `w = exp(2 pi i / n)`. For a monomial
    /// `z^k` this needs `n | k + 2`.
    pub fn is_rotation_invariant(&self, n: usize) -> bool {
        n >= 1
            && self
                .coeffs
                .iter()
                .enumerate()
                .all(|(k, a)| *a == ZERO || (k + 2) % n == 0)
    }

    /// Nonconstant differentials on the plane are the ones that give weakly
    /// complete surfaces; a constant one degenerates to a cylinder over a
    /// geodesic.
    pub fn warnings(&self) -> Vec<String> {
        if self.domain == QDomain::Plane && self.kind() != QKind::Polynomial {
            vec!["Q is constant on the plane: the surface degenerates".to_string()]
        } else {
            Vec::new()
        }
    }

    /// Samples `Q(z)` at every node. Fails if a node leaves the domain.
    pub fn samples(&self, grid: &Grid) -> Result<GridField<Complex64>> {
        if self.domain == QDomain::UnitDisk {
            grid.check_inside_unit_disk()
                .map_err(|_| Error::OutOfDomain { re: grid.max_radius(), im: 0.0 })?;
        }
        Ok(GridField::from_fn(*grid, |_, _, z| self.value(z)))
    }

    pub fn abs2_samples(&self, grid: &Grid) -> GridField<f64> {
        GridField::from_fn(*grid, |_, _, z| self.value(z).norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation_examples() {
        let z2 = QDiff::monomial(c(1.0, 0.0), 2, QDomain::Plane);
        assert_eq!(z2.eval_q(c(1.0, 1.0)).unwrap(), c(0.0, 2.0));
        assert_eq!(z2.eval_dq(c(1.0, 0.0)).unwrap(), c(2.0, 0.0));
        let z3 = QDiff::monomial(c(1.0, 0.0), 3, QDomain::Plane);
        assert!((z3.eval_dq(c(0.0, 1.0)).unwrap() - c(-3.0, 0.0)).norm() < 1e-15);
        let k = QDiff::constant(c(0.3, -2.0), QDomain::UnitDisk);
        assert_eq!(k.eval_q(c(0.5, 0.1)).unwrap(), c(0.3, -2.0));
        assert_eq!(k.eval_dq(c(0.5, 0.1)).unwrap(), ZERO);
        assert_eq!(QDiff::zero(QDomain::Plane).eval_q(c(7.0, 7.0)).unwrap(), ZERO);
    }

    #[test]
    fn kinds_follow_coefficients() {
        assert_eq!(QDiff::new(vec![ZERO, ZERO], QDomain::Plane).kind(), QKind::Zero);
        assert_eq!(QDiff::new(vec![c(1.0, 0.0), ZERO], QDomain::Plane).kind(), QKind::Constant);
        assert_eq!(QDiff::monomial(c(0.1, 0.0), 1, QDomain::Plane).kind(), QKind::Polynomial);
    }

    #[test]
    fn disk_domain_is_enforced() {
        let q = QDiff::monomial(c(1.0, 0.0), 1, QDomain::UnitDisk);
        assert!(matches!(q.eval_q(c(1.0, 0.0)), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn poincare_sup_examples() {
        let g = Grid::inscribed(0.8, 17).unwrap();
        assert_eq!(QDiff::zero(QDomain::UnitDisk).poincare_sup(&g).unwrap(), 0.0);
        let four = QDiff::constant(c(4.0, 0.0), QDomain::UnitDisk);
        assert!((four.poincare_sup(&g).unwrap() - 1.0).abs() < 1e-15);
        let z = QDiff::monomial(c(1.0, 0.0), 1, QDomain::UnitDisk);
        let s = z.poincare_sup(&g).unwrap();
        assert!(s > 0.0 && s <= 0.2);
    }

    #[test]
    fn rotation_invariance_rule() {
        let z2 = QDiff::monomial(c(1.0, 0.0), 2, QDomain::UnitDisk);
        assert!(z2.is_rotation_invariant(2));
        assert!(z2.is_rotation_invariant(4));
        assert!(!z2.is_rotation_invariant(3));
        let z = QDiff::monomial(c(1.0, 0.0), 1, QDomain::UnitDisk);
        assert!(!z.is_rotation_invariant(2));
        assert!(z.is_rotation_invariant(3));
        assert!(QDiff::zero(QDomain::UnitDisk).is_rotation_invariant(4));
    }

    #[test]
    fn constant_on_plane_warns() {
        assert_eq!(QDiff::constant(c(1.0, 0.0), QDomain::Plane).warnings().len(), 1);
        assert!(QDiff::monomial(c(1.0, 0.0), 1, QDomain::Plane).warnings().is_empty());
    }
}
