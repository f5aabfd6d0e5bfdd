use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::BoundaryFunction;
use crate::error::{Error, Result};
use crate::geom::DomainSpec;
use crate::quad::pairwise_sum;

pub const DEFAULT_MAX_STEPS: usize = 10_000;
/// Absorption shell relative to the domain diameter.
pub const DEFAULT_RELATIVE_EPS: f64 = 1e-6;
const MIN_ABSORBED_FRACTION: f64 = 0.9;

/// Random stream for sample `stream_index` of a run seeded with `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        Self { seed, stream_index }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub n_absorbed: usize,
    pub n_escaped: usize,
    pub mean_steps: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkExit {
    /// Nearest boundary point when absorbed, last position otherwise.
    pub point: Complex64,
    /// Boundary parameter of `point`; meaningful only when absorbed.
    pub parameter: f64,
    pub absorbed: bool,
    pub steps: usize,
}

/// `1e-6` of the diameter, or of the starting distance for unbounded domains.
pub fn default_eps(domain: &DomainSpec, z0: Complex64) -> f64 {
    let scale = domain.diameter();
    if scale.is_finite() {
        DEFAULT_RELATIVE_EPS * scale
    } else {
        DEFAULT_RELATIVE_EPS * domain.raw_distance(z0)
    }
}

fn check_walk(domain: &DomainSpec, z0: Complex64, eps: f64) -> Result<()> {
    if !domain.contains(z0) {
        return Err(Error::PointOutsideDomain(z0));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", "must be positive"));
    }
    Ok(())
}

fn walk(
    domain: &DomainSpec,
    z0: Complex64,
    eps: f64,
    max_steps: usize,
    stream: RngStream,
) -> WalkExit {
    let mut rng = stream.generator();
    let mut z = z0;
    let mut steps = 0;
    loop {
        let r = domain.raw_distance(z);
        if r < eps {
            let (point, parameter) = domain.raw_projection(z);
            return WalkExit {
                point,
                parameter,
                absorbed: true,
                steps,
            };
        }
        if steps >= max_steps {
            return WalkExit {
                point: z,
                parameter: f64::NAN,
                absorbed: false,
                steps,
            };
        }
        let u: f64 = rng.gen();
        z += Complex64::from_polar(r, TAU * u);
        steps += 1;
    }
}

/// One walk-on-spheres path from `z0`: jump to a uniform point on the largest
/// inscribed circle until within `eps` of the boundary.
pub fn wos_sample_exit(
    domain: &DomainSpec,
    z0: Complex64,
    eps: f64,
    max_steps: usize,
    stream: RngStream,
) -> Result<WalkExit> {
    check_walk(domain, z0, eps)?;
    Ok(walk(domain, z0, eps, max_steps, stream))
}

/// Monte Carlo estimate of the harmonic extension of `f` at `z0`.
///
/// Sample `i` uses stream `(seed, i)` and results are reduced in index order,
/// so the estimate does not depend on the number of worker threads.
pub fn wos_solve(
    domain: &DomainSpec,
    f: &BoundaryFunction,
    z0: Complex64,
    n_samples: usize,
    eps: f64,
    max_steps: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < 100 {
        return Err(Error::param(
            "n_samples",
            format!("need at least 100, got {n_samples}"),
        ));
    }
    check_walk(domain, z0, eps)?;
    let exits: Vec<WalkExit> = (0..n_samples)
        .into_par_iter()
        .map(|i| walk(domain, z0, eps, max_steps, RngStream::new(seed, i as u64)))
        .collect();

    let values: Vec<f64> = exits
        .iter()
        .filter(|e| e.absorbed)
        .map(|e| f.eval_at(e.point, e.parameter))
        .collect();
    let n_absorbed = values.len();
    let steps: Vec<f64> = exits.iter().map(|e| e.steps as f64).collect();
    let (mean, std_error) = mean_and_error(&values);
    let estimate = McEstimate {
        mean,
        std_error,
        n_samples,
        n_absorbed,
        n_escaped: n_samples - n_absorbed,
        mean_steps: pairwise_sum(&steps) / n_samples as f64,
    };
    if (n_absorbed as f64) < MIN_ABSORBED_FRACTION * n_samples as f64 {
        return Err(Error::TooFewAbsorbed(estimate));
    }
    Ok(estimate)
}

/// Sample mean and `sd/√n`, accumulated around the first value so constant
/// data gives the constant exactly and a zero error.
fn mean_and_error(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let shift = values[0];
    let dev: Vec<f64> = values.iter().map(|v| v - shift).collect();
    let sum = pairwise_sum(&dev);
    let mean = shift + sum / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let sq: Vec<f64> = dev.iter().map(|d| d * d).collect();
    let var = ((pairwise_sum(&sq) - sum * sum / n as f64) / (n - 1) as f64).max(0.0);
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::poisson_kernel;
    use crate::geom::c64;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |s: RngStream| {
            let mut r = s.generator();
            (0..4).map(|_| r.gen::<u64>()).collect::<Vec<_>>()
        };
        let (a, b, c) = (
            draw(RngStream::new(7, 3)),
            draw(RngStream::new(7, 3)),
            draw(RngStream::new(7, 4)),
        );
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sphere_exit_is_uniform_because_center_kernel_is_constant() {
        let z = c64(0.0, 0.0);
        for k in 0..16 {
            let w = Complex64::from_polar(1.0, TAU * k as f64 / 16.0);
            assert!((poisson_kernel(z, 1.0, w, z).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn immediate_absorption() {
        let d = DomainSpec::unit_disc();
        let e = wos_sample_exit(&d, c64(0.9, 0.0), 0.5, 10, RngStream::new(0, 0)).unwrap();
        assert!(e.absorbed);
        assert_eq!(e.steps, 0);
        assert_eq!(e.point, c64(1.0, 0.0));
        assert!(wos_sample_exit(&d, c64(2.0, 0.0), 0.5, 10, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn constant_data_is_exact() {
        let d = DomainSpec::unit_disc();
        let est = wos_solve(
            &d,
            &BoundaryFunction::Constant(1.25),
            c64(0.1, 0.2),
            500,
            1e-6,
            10_000,
            3,
        )
        .unwrap();
        assert_eq!(est.mean, 1.25);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.n_absorbed + est.n_escaped, est.n_samples);
    }

    #[test]
    fn escapes_are_reported() {
        let h = DomainSpec::UpperHalfPlane;
        let res = wos_solve(
            &h,
            &BoundaryFunction::Constant(1.0),
            c64(0.0, 1.0),
            200,
            1e-6,
            3,
            1,
        );
        match res {
            Err(Error::TooFewAbsorbed(est)) => {
                assert_eq!(est.n_absorbed + est.n_escaped, 200);
                assert!(est.n_escaped > 20);
            }
            other => panic!("expected TooFewAbsorbed, got {other:?}"),
        }
    }

    #[test]
    fn mean_and_error_formula() {
        let (m, se) = mean_and_error(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((se - sd / 2.0).abs() < 1e-15);
    }
}
