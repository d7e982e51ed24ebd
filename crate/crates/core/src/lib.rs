//! Numerical and exact-arithmetic workbench for curvature integrals of
//! nearly spherical domains.
//!
//! The crate is organised bottom-up: exact combinatorics, symmetric
//! functions of matrices, radial-graph geometry over the sphere, the
//! axially symmetric reduction, spherical harmonics, the bump
//! counterexample and the stability deficit reports.

pub mod axisym;
pub mod counterexample;
pub mod error;
pub mod exactcomb;
pub mod harmonics;
pub mod io;
pub mod jet;
pub mod par;
#[cfg(test)]
mod properties;
pub mod quad;
pub mod spheregeom;
pub mod stability;
pub mod symfun;

pub use error::{Error, Result};
