//! Thresholds used by the verification suite and by job reports.

/// `|<A,A> + det A| <= MINKOWSKI_REL (1 + |A|^2)`.
pub const MINKOWSKI_REL: f64 = 1e-12;

/// Accepted error reduction per halving of `h` for second-order quantities.
pub const RATE_RANGE: (f64, f64) = (3.0, 5.0);

/// Lower bound on the reduction when only "at least second order" is claimed.
/// Fixtures with exact midpoint coefficients converge faster than `h^2`.
pub const RATE_MIN: f64 = 3.0;

/// Below this a residual is at roundoff and no longer expected to shrink.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;

/// Solver error against the umbilic seed at the finest grid.
pub const PDE_FINAL: f64 = 1e-4;

/// Strip solve against the shooting profile.
pub const ORACLE: f64 = 1e-6;

/// Negative controls must stay above this.
pub const CONTROL_FLOOR: f64 = 1e-2;

/// `|det Psi - 1|` after renormalization.
pub const DET: f64 = 1e-9;

/// `|det Psi - 1|` produced per unit step length before renormalization, on
/// the finest acceptance grids.
pub const DRIFT_RATE: f64 = 1e-9;

/// RK4 error ratio per halving on a constant connection.
pub const RK4_RANGE: (f64, f64) = (12.0, 20.0);

pub const REALITY: f64 = 1e-10;
pub const UNITARITY: f64 = 1e-6;

/// Reconstructed curvature against the target, on the finest grid.
pub const CURVATURE: f64 = 5e-3;

/// Standard deviation of the reconstructed curvature relative to `|K|`.
pub const CURVATURE_SPREAD: f64 = 1e-2;

/// Curvature drift across the associated family.
pub const FAMILY_CURVATURE: f64 = 1e-2;

/// Round trip `K -> lambda0 -> K`.
pub const CONVERSE: f64 = 1e-12;

pub const COMPUTE_P: f64 = 1e-12;

/// Radial lengths against their closed forms.
pub const RADIAL: f64 = 1e-3;

/// Gauss residual of a converged solve.
pub const GAUSS: f64 = crate::gauss::GAUSS_TOL;
