//! Numerical logarithmic potential theory in the complex plane.
//!
//! Domains and Möbius maps live in [`geom`]; circle and disc means in
//! [`means`]; discrete measures and their potentials in [`potential`].
//! [`equilibrium`] minimizes the logarithmic energy on node systems,
//! [`dirichlet`] solves the Dirichlet problem exactly and by walk-on-spheres,
//! [`green`] evaluates Green's functions and [`hausdorff`] estimates
//! Hausdorff content from point clouds.

pub mod cli;
pub mod dirichlet;
pub mod equilibrium;
pub mod error;
pub mod geom;
pub mod green;
pub mod hausdorff;
pub mod means;
pub mod potential;
mod quad;

pub use error::{Error, Result};
