//! Spin Calogero-Moser systems over sl(n+1): dynamical r-matrices, Lax
//! operators, Poisson reduction and numerical verification of the
//! structure that ties them together.

#![allow(clippy::needless_range_loop)]

pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod jet;
pub mod laurent;
pub mod ode;
pub mod phase;
pub mod rmatrix;
pub mod rootsys;

pub use error::{Error, Result};
pub use rootsys::{build_root_system, AlgElement, RootSystem, C64};
pub use dynamics::SystemSpec;
pub use phase::{PhasePoint, ReducedPoint};
pub use rmatrix::RMatrixSpec;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/root_systems.md")]
    pub mod root_systems {}
    #[doc = include_str!("../../../book/src/elliptic.md")]
    pub mod elliptic {}
    #[doc = include_str!("../../../book/src/r_matrices.md")]
    pub mod r_matrices {}
    #[doc = include_str!("../../../book/src/phase_space.md")]
    pub mod phase_space {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    pub mod dynamics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
