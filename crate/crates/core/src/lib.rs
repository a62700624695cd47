//! Constant Gaussian curvature surfaces in hyperbolic 3-space from solutions
//! of the Gauss equation and the extended frame of the Lax pair.

pub mod cmat;
pub mod config;
pub mod error;
pub mod export;
pub mod frame;
pub mod gauss;
pub mod gauss_maps;
pub mod grid;
pub mod lax;
mod linsolve;
pub mod minkowski;
pub mod pipeline;
pub mod quadratic;
pub mod report;
pub mod surface;
pub mod tolerances;
pub mod verify;

pub use cmat::C2x2;
pub use error::{Error, Result};
pub use grid::{Grid, GridField};
pub use quadratic::{QDiff, QDomain};

pub use num_complex;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/minkowski.md")]
    mod minkowski {}
    #[doc = include_str!("../../../book/src/gauss_equation.md")]
    mod gauss_equation {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/surfaces.md")]
    mod surfaces {}
    #[doc = include_str!("../../../book/src/family.md")]
    mod family {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
