//! Plane geometry: points of the extended plane, planar domains with their
//! boundary parameterizations, and Moebius maps.

mod domain;
pub mod io;
mod moebius;
mod point;

pub use domain::{BoundaryArc, DomainSpec, Polygon};
pub use moebius::MoebiusMap;
pub use point::{c64, ExtPoint};

/// Complex numbers are the coordinate type for every finite point.
pub use num_complex::Complex64;
