//! Uniform rectangular grids in the conformal coordinate `z = x + iy`, fields
//! sampled on them, and second-order finite differences.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::cmat::{C2x2, I};
use crate::error::{Error, Node, Result};

/// Rings of nodes next to the boundary left out of diagnostics. Quantities
/// built from nested differences see the one-sided boundary stencils one
/// node in, so two rings are dropped.
pub const DIAGNOSTIC_RING: usize = 2;

/// Convergence rates are measured on the nodes within this fraction of the
/// half-widths around the grid center. Near corners of the square the
/// Dirichlet solution carries weak singularities whose nested differences
/// stay large, so the maximum over the full diagnostic set converges late.
pub const CORE_FRACTION: f64 = 0.75;

/// Uniform grid: node `(i, j)` sits at `x_min + i h + i(y_min + j h)`.
/// Node counts are odd and at least 9 so that a centered grid has `z = 0` as a
/// node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    x_min: f64,
    y_min: f64,
    h: f64,
    nx: usize,
    ny: usize,
}

impl Grid {
    pub fn new(x_min: f64, y_min: f64, h: f64, nx: usize, ny: usize) -> Result<Self> {
        for (name, n) in [("Nx", nx), ("Ny", ny)] {
            if n < 9 || n % 2 == 0 {
                return Err(Error::InvalidGrid(format!("{name} = {n} must be odd and >= 9")));
            }
        }
        if !(h > 0.0 && h.is_finite() && x_min.is_finite() && y_min.is_finite()) {
            return Err(Error::InvalidGrid(format!("bad spacing h = {h}")));
        }
        Ok(Self { x_min, y_min, h, nx, ny })
    }

    /// Square `[-a, a]^2` with `n` nodes per side.
    pub fn centered_square(half_width: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("N = {n} must be odd and >= 9")));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        Self::new(-half_width, -half_width, h, n, n)
    }

    /// Square inscribed in the circle `|z| = r`: its corners lie on the circle.
    pub fn inscribed(r: f64, n: usize) -> Result<Self> {
        Self::centered_square(r / std::f64::consts::SQRT_2, n)
    }

    /// Rectangle `[-a, a] x [-(ny-1)h/2, (ny-1)h/2]` with `nx` nodes along x.
    pub fn strip(half_width: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 {
            return Err(Error::InvalidGrid(format!("Nx = {nx} must be odd and >= 9")));
        }
        let h = 2.0 * half_width / (nx - 1) as f64;
        Self::new(-half_width, -0.5 * (ny as f64 - 1.0) * h, h, nx, ny)
    }

    /// Rectangle with corners `(x_min, y_min)`, `(x_max, y_max)` and `nx`
    /// nodes along x; `ny` is derived from the spacing and must match exactly.
    pub fn rectangle(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize) -> Result<Self> {
        if nx < 2 || !(x_max > x_min) || !(y_max > y_min) {
            return Err(Error::InvalidGrid("degenerate rectangle".into()));
        }
        let h = (x_max - x_min) / (nx - 1) as f64;
        let cells = (y_max - y_min) / h;
        let rounded = cells.round();
        if (cells - rounded).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::InvalidGrid(format!(
                "y extent {} is not a multiple of h = {h}",
                y_max - y_min
            )));
        }
        Self::new(x_min, y_min, h, nx, rounded as usize + 1)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + (self.nx - 1) as f64 * self.h
    }

    pub fn y_max(&self) -> f64 {
        self.y_min + (self.ny - 1) as f64 * self.h
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn node(&self, k: usize) -> Node {
        (k % self.nx, k / self.nx)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.h
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.y(j))
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Node nearest `z = 0`, the base point of frame integration.
    pub fn base_point(&self) -> Node {
        let nearest = |min: f64, n: usize| -> usize {
            let k = (-min / self.h).round();
            k.clamp(0.0, (n - 1) as f64) as usize
        };
        (nearest(self.x_min, self.nx), nearest(self.y_min, self.ny))
    }

    /// All nodes in row-major order (`j` outer, `i` inner).
    pub fn nodes(&self) -> impl Iterator<Item = Node> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (i, j)))
    }

    /// Nodes at least `ring` steps away from the boundary.
    pub fn inner_nodes(&self, ring: usize) -> impl Iterator<Item = Node> + '_ {
        let (nx, ny) = (self.nx, self.ny);
        (ring..ny.saturating_sub(ring))
            .flat_map(move |j| (ring..nx.saturating_sub(ring)).map(move |i| (i, j)))
    }

    /// Nodes used for diagnostics.
    pub fn diagnostic_nodes(&self) -> impl Iterator<Item = Node> + '_ {
        self.inner_nodes(DIAGNOSTIC_RING)
    }

    /// Diagnostic nodes inside the fixed central core of the rectangle; the
    /// same physical region at every resolution.
    pub fn core_nodes(&self) -> impl Iterator<Item = Node> + '_ {
        let (cx, cy) = (0.5 * (self.x_min + self.x_max()), 0.5 * (self.y_min + self.y_max()));
        let rx = CORE_FRACTION * 0.5 * (self.x_max() - self.x_min) + 1e-9 * self.h;
        let ry = CORE_FRACTION * 0.5 * (self.y_max() - self.y_min) + 1e-9 * self.h;
        self.diagnostic_nodes()
            .filter(move |&(i, j)| (self.x(i) - cx).abs() <= rx && (self.y(j) - cy).abs() <= ry)
    }

    /// Nodes excluding the boundary ring.
    pub fn interior(&self) -> impl Iterator<Item = Node> + '_ {
        self.inner_nodes(1)
    }

    /// Largest `|z|` over the grid (attained at a corner).
    pub fn max_radius(&self) -> f64 {
        [
            self.z(0, 0),
            self.z(self.nx - 1, 0),
            self.z(0, self.ny - 1),
            self.z(self.nx - 1, self.ny - 1),
        ]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
    }

    /// Fails with the offending node if any node has `|z| >= 1`.
    pub fn check_inside_unit_disk(&self) -> Result<()> {
        match self.nodes().find(|&(i, j)| self.z(i, j).norm() >= 1.0) {
            Some(node) => Err(Error::DomainViolation { node }),
            None => Ok(()),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let eps = 1e-12 * self.h;
        z.re >= self.x_min - eps
            && z.re <= self.x_max() + eps
            && z.im >= self.y_min - eps
            && z.im <= self.y_max() + eps
    }
}

/// Values that finite differences can combine.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T> Linear for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

/// Linear values that can also be multiplied by complex scalars, so that
/// Wirtinger derivatives make sense.
pub trait ComplexLinear: Linear + Mul<Complex64, Output = Self> {}
impl ComplexLinear for Complex64 {}
impl ComplexLinear for C2x2 {}

/// Samples of a value at every grid node, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField<T> {
    grid: Grid,
    data: Vec<T>,
}

impl<T: Copy> GridField<T> {
    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize, usize, Complex64) -> T) -> Self {
        let data = grid.nodes().map(|(i, j)| f(i, j, grid.z(i, j))).collect();
        Self { grid, data }
    }

    pub fn constant(grid: Grid, value: T) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn from_vec(grid: Grid, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} samples, grid has {} nodes",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[self.grid.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        let k = self.grid.idx(i, j);
        self.data[k] = value;
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_values(self) -> Vec<T> {
        self.data
    }

    pub fn map<S: Copy>(&self, mut f: impl FnMut(T) -> S) -> GridField<S> {
        GridField {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T: Linear> GridField<T> {
    /// Second-order x derivative: centered inside, one-sided on the boundary.
    pub fn dx(&self, i: usize, j: usize) -> T {
        let h = self.grid.h;
        let n = self.grid.nx;
        if i == 0 {
            (self.get(1, j) * 4.0 - self.get(0, j) * 3.0 - self.get(2, j)) * (0.5 / h)
        } else if i + 1 == n {
            (self.get(n - 1, j) * 3.0 - self.get(n - 2, j) * 4.0 + self.get(n - 3, j)) * (0.5 / h)
        } else {
            (self.get(i + 1, j) - self.get(i - 1, j)) * (0.5 / h)
        }
    }

    pub fn dy(&self, i: usize, j: usize) -> T {
        let h = self.grid.h;
        let n = self.grid.ny;
        if j == 0 {
            (self.get(i, 1) * 4.0 - self.get(i, 0) * 3.0 - self.get(i, 2)) * (0.5 / h)
        } else if j + 1 == n {
            (self.get(i, n - 1) * 3.0 - self.get(i, n - 2) * 4.0 + self.get(i, n - 3)) * (0.5 / h)
        } else {
            (self.get(i, j + 1) - self.get(i, j - 1)) * (0.5 / h)
        }
    }
}

impl<T: Linear> GridField<T> {
    /// Bilinear interpolation; `None` outside the grid rectangle.
    pub fn interpolate(&self, z: Complex64) -> Option<T> {
        let g = &self.grid;
        if !g.contains(z) {
            return None;
        }
        let sx = ((z.re - g.x_min) / g.h).clamp(0.0, (g.nx - 1) as f64);
        let sy = ((z.im - g.y_min) / g.h).clamp(0.0, (g.ny - 1) as f64);
        let i = (sx.floor() as usize).min(g.nx - 2);
        let j = (sy.floor() as usize).min(g.ny - 2);
        let (tx, ty) = (sx - i as f64, sy - j as f64);
        let bottom = self.get(i, j) * (1.0 - tx) + self.get(i + 1, j) * tx;
        let top = self.get(i, j + 1) * (1.0 - tx) + self.get(i + 1, j + 1) * tx;
        Some(bottom * (1.0 - ty) + top * ty)
    }
}

impl<T: ComplexLinear> GridField<T> {
    /// `d = (d/dx - i d/dy)/2`.
    pub fn wirtinger(&self, i: usize, j: usize) -> T {
        (self.dx(i, j) - self.dy(i, j) * I) * 0.5
    }

    /// `dbar = (d/dx + i d/dy)/2`.
    pub fn wirtinger_bar(&self, i: usize, j: usize) -> T {
        (self.dx(i, j) + self.dy(i, j) * I) * 0.5
    }
}

impl GridField<f64> {
    /// 5-point Laplacian at an interior node.
    pub fn laplacian(&self, i: usize, j: usize) -> f64 {
        let h2 = self.grid.h * self.grid.h;
        (self.get(i + 1, j) + self.get(i - 1, j) + self.get(i, j + 1) + self.get(i, j - 1)
            - 4.0 * self.get(i, j))
            / h2
    }

    pub fn to_complex(&self) -> GridField<Complex64> {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

/// Max and RMS over a set of nodes, accumulated in iteration order.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NormPair {
    pub max: f64,
    pub rms: f64,
}

impl NormPair {
    pub fn over(values: impl Iterator<Item = f64>) -> Self {
        let mut max: f64 = 0.0;
        let mut sum = 0.0;
        let mut count = 0usize;
        for v in values {
            let a = v.abs();
            if a > max || a.is_nan() {
                max = a;
            }
            sum += a * a;
            count += 1;
        }
        let rms = if count == 0 { 0.0 } else { (sum / count as f64).sqrt() };
        Self { max, rms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_or_small_counts() {
        assert!(Grid::centered_square(0.5, 64).is_err());
        assert!(Grid::centered_square(0.5, 7).is_err());
        assert!(Grid::centered_square(0.5, 9).is_ok());
    }

    #[test]
    fn centered_grid_has_origin_as_base_point() {
        let g = Grid::inscribed(0.8, 33).unwrap();
        let (i, j) = g.base_point();
        assert_eq!((i, j), (16, 16));
        assert!(g.z(i, j).norm() < 1e-15);
        assert!((g.max_radius() - 0.8).abs() < 1e-14);
        assert!(g.check_inside_unit_disk().is_ok());
        assert!(matches!(
            Grid::centered_square(0.8, 33).unwrap().check_inside_unit_disk(),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn rectangle_requires_commensurate_sides() {
        let g = Grid::rectangle(-0.5, 0.5, -0.25, 0.25, 17).unwrap();
        assert_eq!(g.ny(), 9);
        assert!(Grid::rectangle(-0.5, 0.5, -0.25, 0.26, 17).is_err());
    }

    #[test]
    fn differences_are_exact_on_quadratics() {
        let g = Grid::centered_square(1.0, 9).unwrap();
        let f = GridField::from_fn(g, |_, _, z| z.re * z.re + 3.0 * z.re * z.im - z.im);
        for (i, j) in g.nodes() {
            let z = g.z(i, j);
            assert!((f.dx(i, j) - (2.0 * z.re + 3.0 * z.im)).abs() < 1e-12);
            assert!((f.dy(i, j) - (3.0 * z.re - 1.0)).abs() < 1e-12);
        }
        for (i, j) in g.interior() {
            assert!((f.laplacian(i, j) - 2.0).abs() < 1e-11);
        }
    }

    #[test]
    fn wirtinger_of_holomorphic_polynomial() {
        let g = Grid::centered_square(0.5, 9).unwrap();
        let f = GridField::from_fn(g, |_, _, z| z * z);
        for (i, j) in g.nodes() {
            assert!((f.wirtinger(i, j) - g.z(i, j) * 2.0).norm() < 1e-12);
            assert!(f.wirtinger_bar(i, j).norm() < 1e-12);
        }
    }
}
