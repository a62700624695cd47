//! Integration of the extended frame `Psi^{-1} dPsi = U dz + V dzbar` with
//! `Psi = id` at the base point.

use num_complex::Complex64;

use crate::cmat::C2x2;
use crate::error::Node;
use crate::grid::{Grid, GridField};
use crate::lax::{MaurerCartanData, RealForm};
use crate::minkowski::E1;

/// Drift of `det Psi` before renormalization above which a warning is logged.
pub const DRIFT_WARNING: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct FrameField {
    psi: GridField<C2x2>,
    lambda: Complex64,
    base: Node,
    max_step_drift: f64,
    max_drift_rate: f64,
    warnings: Vec<String>,
}

impl FrameField {
    pub fn grid(&self) -> &Grid {
        self.psi.grid()
    }

    pub fn psi(&self) -> &GridField<C2x2> {
        &self.psi
    }

    pub fn get(&self, i: usize, j: usize) -> C2x2 {
        self.psi.get(i, j)
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn base(&self) -> Node {
        self.base
    }

    /// Largest `|det Psi - 1|` produced by a single RK4 step.
    pub fn max_step_drift(&self) -> f64 {
        self.max_step_drift
    }

    /// Largest step drift divided by the step length.
    pub fn max_drift_rate(&self) -> f64 {
        self.max_drift_rate
    }

    /// Largest `|det Psi - 1|` over the stored (renormalized) frame.
    pub fn det_residual(&self) -> f64 {
        self.psi.values().iter().map(|p| (p.det() - 1.0).norm()).fold(0.0, f64::max)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// A frame that is the identity everywhere.
    pub fn identity(grid: Grid, lambda: Complex64) -> Self {
        Self {
            psi: GridField::constant(grid, C2x2::identity()),
            lambda,
            base: grid.base_point(),
            max_step_drift: 0.0,
            max_drift_rate: 0.0,
            warnings: Vec::new(),
        }
    }
}

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

struct Integrator<'a> {
    mc: &'a MaurerCartanData,
    psi: GridField<C2x2>,
    max_step_drift: f64,
    warnings: Vec<String>,
}

impl Integrator<'_> {
    fn coeff_at_node(&self, axis: Axis, i: usize, j: usize) -> C2x2 {
        match axis {
            Axis::X => self.mc.alpha_x(i, j),
            Axis::Y => self.mc.alpha_y(i, j),
        }
    }

    fn coeff_mid(&self, axis: Axis, from: Node, to: Node) -> C2x2 {
        let g = self.mc.grid();
        let z = (g.z(from.0, from.1) + g.z(to.0, to.1)) * 0.5;
        match self.mc.exact_at(z) {
            Some((u, v)) => match axis {
                Axis::X => u + v,
                Axis::Y => (u - v) * crate::cmat::I,
            },
            None => {
                (self.coeff_at_node(axis, from.0, from.1) + self.coeff_at_node(axis, to.0, to.1))
                    * 0.5
            }
        }
    }

    /// One RK4 step of `Psi' = Psi A` from node `from` to the neighbour `to`.
    fn step(&mut self, axis: Axis, from: Node, to: Node) {
        let g = *self.mc.grid();
        let h = match axis {
            Axis::X => g.x(to.0) - g.x(from.0),
            Axis::Y => g.y(to.1) - g.y(from.1),
        };
        let a0 = self.coeff_at_node(axis, from.0, from.1);
        let am = self.coeff_mid(axis, from, to);
        let a1 = self.coeff_at_node(axis, to.0, to.1);
        let p = self.psi.get(from.0, from.1);
        let k1 = p * a0;
        let k2 = (p + k1 * (0.5 * h)) * am;
        let k3 = (p + k2 * (0.5 * h)) * am;
        let k4 = (p + k3 * h) * a1;
        let next = p + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        let (renorm, drift) = next.normalize_det();
        if drift > self.max_step_drift {
            self.max_step_drift = drift;
        }
        if drift > DRIFT_WARNING {
            self.warnings.push(format!(
                "det drift {drift:e} on step {from:?} -> {to:?}"
            ));
        }
        self.psi.set(to.0, to.1, renorm);
    }

    fn sweep(&mut self, axis: Axis, fixed: usize, start: usize, len: usize) {
        let node = |t: usize| match axis {
            Axis::X => (t, fixed),
            Axis::Y => (fixed, t),
        };
        for t in start + 1..len {
            self.step(axis, node(t - 1), node(t));
        }
        for t in (0..start).rev() {
            self.step(axis, node(t + 1), node(t));
        }
    }
}

fn run(mc: &MaurerCartanData, rows_first: bool) -> FrameField {
    let g = *mc.grid();
    let (i0, j0) = g.base_point();
    let mut it = Integrator {
        mc,
        psi: GridField::constant(g, C2x2::identity()),
        max_step_drift: 0.0,
        warnings: Vec::new(),
    };
    if rows_first {
        it.sweep(Axis::X, j0, i0, g.nx());
        for i in 0..g.nx() {
            it.sweep(Axis::Y, i, j0, g.ny());
        }
    } else {
        it.sweep(Axis::Y, i0, j0, g.ny());
        for j in 0..g.ny() {
            it.sweep(Axis::X, j, i0, g.nx());
        }
    }
    FrameField {
        psi: it.psi,
        lambda: mc.lambda(),
        base: (i0, j0),
        max_step_drift: it.max_step_drift,
        max_drift_rate: it.max_step_drift / g.h(),
        warnings: it.warnings,
    }
}

/// Integrates along the base row through the base point, then up and down
/// every column, with classical RK4 and determinant renormalization.
pub fn integrate_frame(mc: &MaurerCartanData) -> FrameField {
    run(mc, true)
}

/// Same integration along the base column first, then the rows; comparing
/// against [`integrate_frame`] measures path dependence.
pub fn integrate_frame_columns_first(mc: &MaurerCartanData) -> FrameField {
    run(mc, false)
}

/// Largest `|Psi* e1 Psi - e1|` (SU(1,1)) or `|Psi* Psi - id|` (SU(2)).
pub fn frame_unitarity_residual(psi: &FrameField, target: RealForm) -> f64 {
    psi.psi
        .values()
        .iter()
        .map(|p| match target {
            RealForm::Su11 => (p.adjoint() * E1 * *p - E1).frobenius(),
            RealForm::Su2 => (p.adjoint() * *p - C2x2::identity()).frobenius(),
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{E2_HAT, E3_HAT};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_connection_gives_identity() {
        let g = Grid::centered_square(1.0, 9).unwrap();
        let mc = MaurerCartanData::constant(g, C2x2::zero(), C2x2::zero(), c(1.0, 0.0)).unwrap();
        let f = integrate_frame(&mc);
        assert!(f.psi().values().iter().all(|p| *p == C2x2::identity()));
        assert_eq!(frame_unitarity_residual(&f, RealForm::Su2), 0.0);
    }

    #[test]
    fn constant_connection_matches_exponential() {
        let u = E1 * c(0.3, 0.1) + E2_HAT * 0.75;
        let v = E1 * c(-0.3, 0.1) + E3_HAT * 0.25;
        let err = |n| {
            let g = Grid::centered_square(1.0, n).unwrap();
            let mc = MaurerCartanData::constant(g, u, v, c(1.0, 0.0)).unwrap();
            let f = integrate_frame(&mc);
            let (_, j0) = g.base_point();
            (f.get(n - 1, j0) - (u + v).exp()).frobenius()
        };
        let (e1, e2) = (err(17), err(33));
        let ratio = e1 / e2;
        assert!((12.0..=20.0).contains(&ratio), "{e1:e} {e2:e} {ratio}");
    }
}
