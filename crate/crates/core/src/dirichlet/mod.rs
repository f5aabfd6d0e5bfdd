//! Dirichlet problems and harmonic measure: the Poisson integral on discs,
//! closed forms on the half-plane, conformal transport by Möbius maps, and
//! walk-on-spheres Monte Carlo for general domains.

mod analytic;
mod boundary;
mod wos;

pub use analytic::{
    exit_from_uniform, harmonic_measure, harmonic_measure_disc, harmonic_measure_halfplane,
    poisson_kernel, poisson_solve, pushforward_measure, sample_exit_halfplane,
};
pub use boundary::BoundaryFunction;
pub use wos::{
    default_eps, wos_sample_exit, wos_solve, McEstimate, RngStream, WalkExit, DEFAULT_MAX_STEPS,
    DEFAULT_RELATIVE_EPS,
};
