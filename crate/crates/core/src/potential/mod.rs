//! Discrete measures and their logarithmic potentials and energies.

pub mod io;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::means::ScalarField;
use crate::quad::{bump_laplacian, bump_profile, gauss_legendre};

/// Self-energy constant of uniform mass on a straight segment:
/// `-∫∫ log|x - y| dx dy / ℓ² = 3/2 - log ℓ`.
pub const SEGMENT_SELF_ENERGY: f64 = 1.5;

/// Weighted point cloud. Node `i` stands for mass `weights[i]` spread
/// uniformly over a straight element of length `element_lengths[i]`, which is
/// what gives the measure a finite energy.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
    element_lengths: Vec<f64>,
    total_mass: f64,
}

impl DiscreteMeasure {
    pub fn new(
        nodes: Vec<Complex64>,
        weights: Vec<f64>,
        element_lengths: Vec<f64>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidMeasure(
                "measure needs at least one node".into(),
            ));
        }
        if nodes.len() != weights.len() || nodes.len() != element_lengths.len() {
            return Err(Error::InvalidMeasure(format!(
                "length mismatch: {} nodes, {} weights, {} element lengths",
                nodes.len(),
                weights.len(),
                element_lengths.len()
            )));
        }
        if let Some(i) = nodes
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidMeasure(format!("node {i} is not finite")));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "weight {i} is negative or not finite"
            )));
        }
        if let Some(i) = element_lengths
            .iter()
            .position(|l| !(l.is_finite() && *l > 0.0))
        {
            return Err(Error::InvalidMeasure(format!(
                "element length {i} is not positive"
            )));
        }
        let total_mass = weights.iter().sum();
        Ok(Self {
            nodes,
            weights,
            element_lengths,
            total_mass,
        })
    }

    /// Point mass `weight` at `z` with a unit element length.
    pub fn atom(z: Complex64, weight: f64) -> Result<Self> {
        Self::new(vec![z], vec![weight], vec![1.0])
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn element_lengths(&self) -> &[f64] {
        &self.element_lengths
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass - 1.0).abs() <= 1e-10
    }

    /// Push-forward under `z -> a z + b`; element lengths scale by `|a|`.
    pub fn affine(&self, a: Complex64, b: Complex64) -> Result<Self> {
        let s = a.norm();
        Self::new(
            self.nodes.iter().map(|z| a * z + b).collect(),
            self.weights.clone(),
            self.element_lengths.iter().map(|l| l * s).collect(),
        )
    }

    /// `alpha * self`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(
            self.nodes.clone(),
            self.weights.iter().map(|w| w * alpha).collect(),
            self.element_lengths.clone(),
        )
    }

    /// `self + other` as a concatenated node list.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        fn cat<T: Clone>(a: &[T], b: &[T]) -> Vec<T> {
            [a, b].concat()
        }
        Self::new(
            cat(&self.nodes, &other.nodes),
            cat(&self.weights, &other.weights),
            cat(&self.element_lengths, &other.element_lengths),
        )
    }
}

/// `p_μ(z) = Σ w_i log|x_i - z|`; `-∞` exactly at nodes of positive weight.
pub fn potential_eval(mu: &DiscreteMeasure, z: Complex64) -> f64 {
    let mut sum = 0.0;
    for (x, &w) in mu.nodes.iter().zip(&mu.weights) {
        if w == 0.0 {
            continue;
        }
        let d = (x - z).norm();
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        sum += w * d.ln();
    }
    sum
}

/// The potential as a [`ScalarField`].
pub fn potential_field(mu: &DiscreteMeasure) -> ScalarField {
    let mu = mu.clone();
    ScalarField::new("potential", move |z| potential_eval(&mu, z))
}

/// Discrete logarithmic energy
/// `Σ_{i≠j} w_i w_j (-log|x_i - x_j|) + Σ_i w_i² (3/2 - log ℓ_i)`.
pub fn energy(mu: &DiscreteMeasure) -> Result<f64> {
    let n = mu.len();
    let mut off = 0.0;
    for i in 0..n {
        let wi = mu.weights[i];
        if wi == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in (i + 1)..n {
            let wj = mu.weights[j];
            if wj == 0.0 {
                continue;
            }
            let d = (mu.nodes[i] - mu.nodes[j]).norm();
            if d == 0.0 {
                return Err(Error::CoincidentNodes(i, j));
            }
            row -= wj * d.ln();
        }
        off += 2.0 * wi * row;
    }
    let diag: f64 = mu
        .weights
        .iter()
        .zip(&mu.element_lengths)
        .map(|(w, l)| w * w * (SEGMENT_SELF_ENERGY - l.ln()))
        .sum();
    Ok(off + diag)
}

/// `φ(x) = C exp(-1 / (1 - |x - center|² / radius²))` inside the disc, 0 outside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestFunctionBump {
    pub center: Complex64,
    pub radius: f64,
    pub normalization: f64,
}

impl TestFunctionBump {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        Self::with_normalization(center, radius, 1.0)
    }

    pub fn with_normalization(center: Complex64, radius: f64, normalization: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRadius(radius));
        }
        if !(normalization > 0.0 && normalization.is_finite()) {
            return Err(Error::param("normalization", "must be positive"));
        }
        Ok(Self {
            center,
            radius,
            normalization,
        })
    }

    fn q(&self, z: Complex64) -> f64 {
        (z - self.center).norm_sqr() / (self.radius * self.radius)
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        self.normalization * bump_profile(self.q(z))
    }

    /// Closed-form Laplacian.
    pub fn laplacian(&self, z: Complex64) -> f64 {
        self.normalization * bump_laplacian(self.q(z), self.radius)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pairing {
    /// `∫ p_μ Δφ dm`
    pub lhs: f64,
    /// `2π Σ w_i φ(x_i)`
    pub rhs: f64,
}

impl Pairing {
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(1.0)
    }
}

/// Pairs the distributional Laplacian of `p_μ` with a bump: the two sides of
/// `⟨Δp_μ, φ⟩ = 2π ⟨μ, φ⟩`. The left side is a polar quadrature over the
/// bump's support with `grid_resolution` Gauss–Legendre radii and twice as
/// many angles; grid points that hit a node exactly are skipped.
pub fn laplacian_pairing(
    mu: &DiscreteMeasure,
    phi: &TestFunctionBump,
    grid_resolution: usize,
) -> Result<Pairing> {
    if grid_resolution < 128 {
        return Err(Error::param(
            "grid_resolution",
            format!("need at least 128, got {grid_resolution}"),
        ));
    }
    let n_angular = 2 * grid_resolution;
    let (s, ws) = gauss_legendre(grid_resolution, 0.0, phi.radius);
    let mut lhs = 0.0;
    for (&s, &w) in s.iter().zip(&ws) {
        let q = s * s / (phi.radius * phi.radius);
        let lap = phi.normalization * bump_laplacian(q, phi.radius);
        if lap == 0.0 {
            continue;
        }
        let mut ring = 0.0;
        for k in 0..n_angular {
            let z =
                phi.center + Complex64::from_polar(s, TAU * (k as f64 + 0.5) / n_angular as f64);
            let p = potential_eval(mu, z);
            if p.is_finite() {
                ring += p;
            }
        }
        lhs += w * s * lap * ring * TAU / n_angular as f64;
    }
    let rhs = 2.0
        * PI
        * mu.nodes
            .iter()
            .zip(&mu.weights)
            .map(|(&x, &w)| w * phi.eval(x))
            .sum::<f64>();
    Ok(Pairing { lhs, rhs })
}

/// Five-point Laplacian `(f(z±h) + f(z±ih) - 4 f(z)) / h²`.
pub fn stencil_laplacian(f: impl Fn(Complex64) -> f64, z: Complex64, h: f64) -> f64 {
    let e = Complex64::new(h, 0.0);
    let i = Complex64::new(0.0, h);
    (f(z + e) + f(z - e) + f(z + i) + f(z - i) - 4.0 * f(z)) / (h * h)
}

/// Stencil Laplacian of `h = u - p_μ` at each probe. Values near zero
/// certify that `u` and `p_μ` differ by a harmonic function there.
/// `mu = None` is the zero measure.
pub fn riesz_residual(
    u: &ScalarField,
    mu: Option<&DiscreteMeasure>,
    probe_points: &[Complex64],
    stencil_h: f64,
) -> Result<Vec<f64>> {
    if !(stencil_h > 0.0 && stencil_h.is_finite()) {
        return Err(Error::param("stencil_h", "must be positive"));
    }
    let residual = |z: Complex64| u.eval(z) - mu.map_or(0.0, |m| potential_eval(m, z));
    probe_points
        .iter()
        .map(|&z| {
            if let Some(m) = mu {
                let too_close = m
                    .nodes
                    .iter()
                    .zip(&m.weights)
                    .any(|(x, &w)| w > 0.0 && (x - z).norm() < 10.0 * stencil_h);
                if too_close {
                    return Err(Error::ProbeTooCloseToSingularity(z));
                }
            }
            let e = Complex64::new(stencil_h, 0.0);
            let i = Complex64::new(0.0, stencil_h);
            for p in [z, z + e, z - e, z + i, z - i] {
                if !residual(p).is_finite() {
                    return Err(Error::ProbeTooCloseToSingularity(z));
                }
            }
            Ok(stencil_laplacian(residual, z, stencil_h))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::c64;

    fn roots_of_unity(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
            .collect()
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![], vec![], vec![]).is_err());
        assert!(DiscreteMeasure::new(vec![c64(0.0, 0.0)], vec![-1.0], vec![1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![c64(0.0, 0.0)], vec![1.0], vec![0.0]).is_err());
        assert!(DiscreteMeasure::new(vec![c64(0.0, 0.0)], vec![1.0, 2.0], vec![1.0]).is_err());
        let m = DiscreteMeasure::new(
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![0.25, 0.75],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(m.is_probability());
        assert!(!m.scaled(2.0).unwrap().is_probability());
    }

    #[test]
    fn potential_examples() {
        let atom = DiscreteMeasure::atom(c64(0.0, 0.0), 1.0).unwrap();
        assert!((potential_eval(&atom, c64(std::f64::consts::E, 0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(potential_eval(&atom, c64(0.0, 0.0)), f64::NEG_INFINITY);
        let n = 64;
        let m = DiscreteMeasure::new(
            roots_of_unity(n),
            vec![1.0 / n as f64; n],
            vec![TAU / n as f64; n],
        )
        .unwrap();
        assert!(potential_eval(&m, c64(0.0, 0.0)).abs() < 1e-12);
        // zero weight at the evaluation point contributes nothing
        let m = DiscreteMeasure::new(
            vec![c64(0.0, 0.0), c64(1.0, 0.0)],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert_eq!(potential_eval(&m, c64(0.0, 0.0)), 0.0);
    }

    #[test]
    fn energy_examples() {
        let m = DiscreteMeasure::new(
            vec![c64(-1.0, 0.0), c64(1.0, 0.0)],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
        )
        .unwrap();
        let off = energy(&m).unwrap() - 2.0 * 0.25 * 1.5;
        assert!((off + 2f64.ln() / 2.0).abs() < 1e-15);

        let single = DiscreteMeasure::new(vec![c64(3.0, 1.0)], vec![0.7], vec![0.2]).unwrap();
        assert!((energy(&single).unwrap() - 0.49 * (1.5 - 0.2f64.ln())).abs() < 1e-15);

        let n = 200;
        let m = DiscreteMeasure::new(
            roots_of_unity(n),
            vec![1.0 / n as f64; n],
            vec![TAU / n as f64; n],
        )
        .unwrap();
        // oracle: direct double sum over ordered pairs
        let nodes = roots_of_unity(n);
        let mut direct = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    direct -= (nodes[i] - nodes[j]).norm().ln() / (n * n) as f64;
                }
            }
        }
        direct += (1.5 - (TAU / n as f64).ln()) / n as f64;
        let e = energy(&m).unwrap();
        assert!((e - direct).abs() < 1e-12);
        assert!((e - (1.5 - TAU.ln()) / n as f64).abs() < 1e-12);
        assert!((e + 1.69e-3).abs() < 1e-5);
    }

    #[test]
    fn coincident_nodes_are_an_error() {
        let m = DiscreteMeasure::new(
            vec![c64(1.0, 0.0), c64(1.0, 0.0)],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(energy(&m), Err(Error::CoincidentNodes(0, 1))));
        let m = DiscreteMeasure::new(
            vec![c64(1.0, 0.0), c64(1.0, 0.0)],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        )
        .unwrap();
        assert!(energy(&m).is_ok());
    }

    /// Independent check of the 3/2 constant: 2-D Gauss–Legendre quadrature
    /// of -∫∫ log|x - y| over the unit square. The square splits into two
    /// triangles; on {y < x} the Duffy map y = x(1 - u) turns the diagonal
    /// singularity into integrable endpoint logs.
    #[test]
    fn segment_self_energy_constant() {
        let (x, wx) = gauss_legendre(400, 0.0, 1.0);
        let mut tri = 0.0;
        for (&xi, &wi) in x.iter().zip(&wx) {
            for (&uj, &wj) in x.iter().zip(&wx) {
                let y = xi * (1.0 - uj);
                tri -= wi * wj * xi * (xi - y).ln();
            }
        }
        assert!(
            (2.0 * tri - SEGMENT_SELF_ENERGY).abs() < 1e-5,
            "{}",
            2.0 * tri
        );
        // length scaling: ℓ² · (3/2 - log ℓ) normalized by ℓ² gives 3/2 - log ℓ
        let l: f64 = 0.37;
        let scaled = 2.0 * tri - l.ln();
        assert!((scaled - (SEGMENT_SELF_ENERGY - l.ln())).abs() < 1e-5);
    }

    #[test]
    fn bump_vanishes_at_support_boundary() {
        let phi = TestFunctionBump::new(c64(0.5, 0.5), 0.4).unwrap();
        let edge = c64(0.5, 0.5) + Complex64::from_polar(0.4 * (1.0 - 1e-3), 0.3);
        assert!(phi.eval(edge) < 1e-10 && phi.laplacian(edge).abs() < 1e-10);
        assert_eq!(phi.eval(c64(2.0, 0.0)), 0.0);
    }

    #[test]
    fn pairing_examples() {
        let atom = DiscreteMeasure::atom(c64(0.0, 0.0), 1.0).unwrap();
        let phi = TestFunctionBump::new(c64(0.0, 0.0), 1.0).unwrap();
        let p = laplacian_pairing(&atom, &phi, 256).unwrap();
        assert!((p.rhs - TAU * (-1f64).exp()).abs() < 1e-14);
        assert!(p.relative_error() < 1e-3, "{p:?}");

        let far = DiscreteMeasure::new(
            vec![c64(3.0, 0.0), c64(0.0, -2.5)],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
        )
        .unwrap();
        let p = laplacian_pairing(&far, &phi, 256).unwrap();
        assert_eq!(p.rhs, 0.0);
        assert!(p.lhs.abs() < 1e-6, "{p:?}");

        let two = DiscreteMeasure::new(
            vec![c64(0.6, 0.0), c64(-0.6, 0.0)],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
        )
        .unwrap();
        let phi = TestFunctionBump::new(c64(0.6, 0.0), 0.3).unwrap();
        let p = laplacian_pairing(&two, &phi, 256).unwrap();
        assert!((p.rhs - TAU * 0.5 * phi.eval(c64(0.6, 0.0))).abs() < 1e-14);
        assert!(p.relative_error() < 1e-3, "{p:?}");
        assert!(laplacian_pairing(&two, &phi, 64).is_err());
    }

    #[test]
    fn riesz_residual_examples() {
        let a = c64(0.2, -0.1);
        let atom = DiscreteMeasure::atom(a, 1.0).unwrap();
        let u = ScalarField::new("log+re", move |z: Complex64| (z - a).norm().ln() + z.re);
        let probes = [c64(1.0, 1.0), c64(-0.5, 0.7), c64(0.3, -0.9)];
        for v in riesz_residual(&u, Some(&atom), &probes, 1e-3).unwrap() {
            assert!(v.abs() < 1e-4, "{v}");
        }
        let pot = potential_field(&atom);
        for v in riesz_residual(&pot, Some(&atom), &probes, 1e-3).unwrap() {
            assert!(v.abs() < 1e-12);
        }
        for v in riesz_residual(&ScalarField::abs_sq(), None, &probes, 1e-3).unwrap() {
            assert!((v - 4.0).abs() < 1e-6);
        }
        assert!(matches!(
            riesz_residual(&u, Some(&atom), &[a + c64(5e-3, 0.0)], 1e-3),
            Err(Error::ProbeTooCloseToSingularity(_))
        ));
    }
}
