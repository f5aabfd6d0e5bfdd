//! Green's functions of discs, the upper half-plane and disc complements,
//! the normal-derivative form of harmonic measure, and Bernstein–Walsh
//! growth bounds for polynomials.
//!
//! Every supported domain has a Möbius map `φ` onto the unit disc with
//! `φ(pole) = 0`, and `g(z) = -log|φ(z)|`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{c64, BoundaryArc, DomainSpec, ExtPoint, MoebiusMap};
use crate::potential::stencil_laplacian;
use crate::quad::pairwise_sum;

pub const DEFAULT_FD_STEP: f64 = 1e-5;
const NONNEGATIVE_TOL: f64 = -1e-12;
const HARMONIC_TOL: f64 = 1e-4;
const BOUNDARY_TOL: f64 = 5e-3;
const BW_RELATIVE_TOL: f64 = 1e-9;

/// Complex polynomial, coefficients lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialC {
    coefficients: Vec<Complex64>,
}

impl PolynomialC {
    /// Trailing zero coefficients are dropped; the zero polynomial is
    /// rejected.
    pub fn new(mut coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::param("coefficients", "must be finite"));
        }
        while coefficients.last().is_some_and(|c| c.norm() == 0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return Err(Error::param(
                "coefficients",
                "the zero polynomial has no degree",
            ));
        }
        Ok(Self { coefficients })
    }

    pub fn monomial(n: usize) -> Self {
        let mut coefficients = vec![c64(0.0, 0.0); n + 1];
        coefficients[n] = c64(1.0, 0.0);
        Self { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }
}

/// Horner evaluation.
pub fn poly_eval(p: &PolynomialC, z: Complex64) -> Complex64 {
    p.coefficients
        .iter()
        .rev()
        .fold(c64(0.0, 0.0), |acc, c| acc * z + c)
}

/// Domain and pole of a Green's function.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenSpec {
    domain: DomainSpec,
    pole: ExtPoint,
    to_disc: MoebiusMap,
}

impl GreenSpec {
    pub fn new(domain: DomainSpec, pole: ExtPoint) -> Result<Self> {
        let to_disc = match (&domain, pole) {
            (DomainSpec::Polygon(_), _) => return Err(Error::Unsupported(
                "Green's functions are available for discs, the half-plane and disc complements"
                    .into(),
            )),
            (_, ExtPoint::Finite(p)) if !domain.contains(p) => {
                return Err(Error::PointOutsideDomain(p))
            }
            (DomainSpec::Disc { center, radius }, ExtPoint::Finite(p)) => {
                let normalize = MoebiusMap::affine(c64(1.0 / radius, 0.0), -center / radius)?;
                let q = (p - center) / radius;
                MoebiusMap::disc_automorphism(q)?.compose(&normalize)
            }
            (DomainSpec::UpperHalfPlane, ExtPoint::Finite(p)) => {
                MoebiusMap::new(c64(1.0, 0.0), -p, c64(1.0, 0.0), -p.conj())?
            }
            (DomainSpec::DiscComplement { center, radius }, pole) => {
                let invert =
                    MoebiusMap::new(c64(0.0, 0.0), c64(*radius, 0.0), c64(1.0, 0.0), -center)?;
                match pole {
                    ExtPoint::Infinity => invert,
                    ExtPoint::Finite(p) => {
                        let q = c64(*radius, 0.0) / (p - center);
                        MoebiusMap::disc_automorphism(q)?.compose(&invert)
                    }
                }
            }
            (_, ExtPoint::Infinity) => {
                return Err(Error::param(
                    "pole",
                    "infinity is a pole only for disc complements",
                ))
            }
        };
        Ok(Self {
            domain,
            pole,
            to_disc,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn pole(&self) -> ExtPoint {
        self.pole
    }

    /// The Möbius map onto the unit disc that sends the pole to 0.
    pub fn to_unit_disc(&self) -> &MoebiusMap {
        &self.to_disc
    }

    /// Distance from the pole to the boundary; the radius when the pole is
    /// infinite.
    fn length_scale(&self) -> f64 {
        match (self.pole, &self.domain) {
            (ExtPoint::Finite(p), d) => d.raw_distance(p),
            (ExtPoint::Infinity, DomainSpec::DiscComplement { radius, .. }) => *radius,
            _ => unreachable!("validated in GreenSpec::new"),
        }
    }
}

pub fn green_eval(g: &GreenSpec, z: Complex64) -> Result<f64> {
    if !g.domain.contains(z) {
        return Err(if g.domain.raw_distance(z) == 0.0 {
            Error::PointOnBoundary(z)
        } else {
            Error::PointOutsideDomain(z)
        });
    }
    if g.pole == ExtPoint::Finite(z) {
        return Err(Error::PoleHit(z));
    }
    match g.to_disc.apply(ExtPoint::Finite(z)) {
        ExtPoint::Finite(w) if w.norm() > 0.0 => Ok(-w.norm().ln()),
        _ => Err(Error::PoleHit(z)),
    }
}

/// Outcome of the Green's function axiom checks at seeded random probes.
///
/// Stencil residuals are multiplied by the squared distance that sets the
/// local scale, so they do not depend on the size of the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenAxiomsReport {
    pub n_probes: usize,
    /// Smallest value at interior probes (nonnegativity).
    pub min_value: f64,
    /// Largest scaled stencil Laplacian away from the pole (harmonicity).
    pub harmonic_residual: f64,
    /// Largest scaled stencil Laplacian of `g + log|z - ζ|` near the pole,
    /// or of `g - log|z - c|` far out when the pole is infinite.
    pub pole_residual: f64,
    /// Largest value just inside the boundary (boundary decay).
    pub max_boundary_value: f64,
    pub violations: Vec<String>,
}

impl GreenAxiomsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sample_interior(g: &GreenSpec, rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    loop {
        let (u, v): (f64, f64) = (rng.gen(), rng.gen());
        let z = match (&g.domain, g.pole) {
            (DomainSpec::Disc { center, radius }, _) => {
                center + Complex64::from_polar(radius * u.sqrt(), TAU * v)
            }
            (DomainSpec::UpperHalfPlane, ExtPoint::Finite(p)) => {
                c64(p.re + scale * 10.0 * (2.0 * u - 1.0), scale * 10.0 * v)
            }
            (DomainSpec::DiscComplement { center, radius }, pole) => {
                let reach = match pole {
                    ExtPoint::Finite(p) => (p - center).norm() + 5.0 * scale,
                    ExtPoint::Infinity => 5.0 * radius,
                };
                center + Complex64::from_polar(radius + (reach - radius) * u, TAU * v)
            }
            _ => unreachable!("validated in GreenSpec::new"),
        };
        if g.domain.contains(z) && g.pole != ExtPoint::Finite(z) {
            return z;
        }
    }
}

/// Boundary point at fraction `s` of the boundary, with the inward unit
/// normal there. On the half-plane the points cluster around the pole.
fn boundary_probe(g: &GreenSpec, s: f64, scale: f64) -> (Complex64, Complex64) {
    match (&g.domain, g.pole) {
        (DomainSpec::UpperHalfPlane, ExtPoint::Finite(p)) => {
            let x = p.re + scale * (std::f64::consts::PI * (s - 0.5)).tan();
            (c64(x, 0.0), c64(0.0, 1.0))
        }
        (d, _) => {
            let w = d
                .boundary_point(s)
                .finite()
                .expect("bounded boundary parameter");
            (w, -d.outward_normal(w).expect("disc-like domain"))
        }
    }
}

/// Checks nonnegativity, harmonicity away from the pole, the logarithmic
/// singularity at the pole and boundary decay at `n_probes` seeded probes
/// of each kind.
pub fn green_axioms_check(g: &GreenSpec, n_probes: usize, seed: u64) -> Result<GreenAxiomsReport> {
    if n_probes < 10 {
        return Err(Error::param(
            "n_probes",
            format!("need at least 10, got {n_probes}"),
        ));
    }
    let scale = g.length_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let value = |z: Complex64| green_eval(g, z).unwrap_or(f64::NAN);
    let pole_distance = |z: Complex64| match g.pole {
        ExtPoint::Finite(p) => (z - p).norm(),
        ExtPoint::Infinity => f64::INFINITY,
    };

    let mut min_value = f64::INFINITY;
    let mut harmonic_residual: f64 = 0.0;
    let mut harmonic_count = 0;
    let mut attempts = 0;
    while harmonic_count < n_probes && attempts < 1000 * n_probes {
        attempts += 1;
        let z = sample_interior(g, &mut rng, scale);
        min_value = min_value.min(green_eval(g, z)?);
        let d = pole_distance(z).min(g.domain.raw_distance(z));
        if d < 0.05 * scale || harmonic_count >= n_probes {
            continue;
        }
        harmonic_count += 1;
        let lap = stencil_laplacian(value, z, 2e-4 * d);
        harmonic_residual = harmonic_residual.max(d * d * lap.abs());
    }

    let mut pole_residual: f64 = 0.0;
    for _ in 0..n_probes {
        let (u, v): (f64, f64) = (rng.gen(), rng.gen());
        let (lap, local) = match (g.pole, &g.domain) {
            (ExtPoint::Finite(p), _) => {
                let z = p + Complex64::from_polar(scale * (0.01 + 0.09 * u), TAU * v);
                let regular = |w: Complex64| value(w) + (w - p).norm().ln();
                (stencil_laplacian(regular, z, 2e-4 * scale), scale)
            }
            (ExtPoint::Infinity, DomainSpec::DiscComplement { center, radius }) => {
                let r = radius * (10.0 + 10.0 * u);
                let z = center + Complex64::from_polar(r, TAU * v);
                let regular = |w: Complex64| value(w) - (w - center).norm().ln();
                (stencil_laplacian(regular, z, 2e-4 * r), r)
            }
            _ => unreachable!("validated in GreenSpec::new"),
        };
        pole_residual = pole_residual.max(local * local * lap.abs());
    }

    let mut max_boundary_value = f64::NEG_INFINITY;
    for k in 0..n_probes {
        let (w, inward) = boundary_probe(g, (k as f64 + 0.5) / n_probes as f64, scale);
        max_boundary_value = max_boundary_value.max(green_eval(g, w + inward * (1e-3 * scale))?);
    }

    let mut violations = Vec::new();
    if min_value < NONNEGATIVE_TOL {
        violations.push(format!("negative value {min_value}"));
    }
    if harmonic_residual.is_nan() || harmonic_residual > HARMONIC_TOL || harmonic_count < n_probes {
        violations.push(format!(
            "harmonicity residual {harmonic_residual} over {harmonic_count} probes"
        ));
    }
    if pole_residual.is_nan() || pole_residual > HARMONIC_TOL {
        violations.push(format!("pole regularity residual {pole_residual}"));
    }
    if max_boundary_value.is_nan() || max_boundary_value > BOUNDARY_TOL {
        violations.push(format!("boundary value {max_boundary_value}"));
    }
    Ok(GreenAxiomsReport {
        n_probes,
        min_value,
        harmonic_residual,
        pole_residual,
        max_boundary_value,
        violations,
    })
}

/// `(1/2π) ∫_arc ∂g/∂n ds` with `n` the inner normal, which equals the
/// harmonic measure of the arc seen from the pole. The derivative is a
/// one-sided difference with step `h·R`; the integral is the trapezoid rule.
pub fn green_normal_derivative_measure(
    g: &GreenSpec,
    arc: &BoundaryArc,
    h: f64,
    n_nodes: usize,
) -> Result<f64> {
    let (center, radius) = match (&g.domain, g.pole) {
        (DomainSpec::Disc { center, radius }, ExtPoint::Finite(_)) => (*center, *radius),
        _ => {
            return Err(Error::Unsupported(
                "normal-derivative measure is implemented on discs".into(),
            ))
        }
    };
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::param(
            "h",
            format!("must lie in [1e-6, 1e-3], got {h}"),
        ));
    }
    if n_nodes < 16 {
        return Err(Error::param(
            "n_nodes",
            format!("need at least 16, got {n_nodes}"),
        ));
    }
    let step = h * radius;
    let derivative = |t: f64| -> Result<f64> {
        let dir = Complex64::from_polar(1.0, TAU * t);
        let inside = center + dir * (radius - step);
        Ok(green_eval(g, inside)? / step)
    };
    let sweep = arc.fraction();
    let ds = TAU * radius * sweep / n_nodes as f64;
    let terms: Vec<f64> = if arc.is_full() {
        (0..n_nodes)
            .map(|k| derivative(k as f64 / n_nodes as f64))
            .collect::<Result<_>>()?
    } else {
        (0..=n_nodes)
            .map(|k| {
                let weight = if k == 0 || k == n_nodes { 0.5 } else { 1.0 };
                Ok(weight * derivative(arc.t0 + sweep * k as f64 / n_nodes as f64)?)
            })
            .collect::<Result<_>>()?
    };
    Ok(pairwise_sum(&terms) * ds / TAU)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupNorm {
    pub value: f64,
    /// Angle in `[0, 2π)` where the maximum was found.
    pub angle: f64,
}

/// `max |p|` on the closed unit disc, attained on the unit circle.
pub fn sup_norm_on_disc(p: &PolynomialC, n_nodes: usize) -> Result<SupNorm> {
    sup_norm_on_circle(p, c64(0.0, 0.0), 1.0, n_nodes)
}

/// `max |p|` on the closed disc `|z - center| <= radius`: the best of
/// `n_nodes` boundary samples, refined by golden-section search between its
/// neighbours.
pub fn sup_norm_on_circle(
    p: &PolynomialC,
    center: Complex64,
    radius: f64,
    n_nodes: usize,
) -> Result<SupNorm> {
    if n_nodes < 256 {
        return Err(Error::param(
            "n_nodes",
            format!("need at least 256, got {n_nodes}"),
        ));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidRadius(radius));
    }
    let modulus = |theta: f64| poly_eval(p, center + Complex64::from_polar(radius, theta)).norm();
    let dtheta = TAU / n_nodes as f64;
    let mut best = SupNorm {
        value: modulus(0.0),
        angle: 0.0,
    };
    for k in 1..n_nodes {
        let theta = k as f64 * dtheta;
        let v = modulus(theta);
        if v > best.value {
            best = SupNorm {
                value: v,
                angle: theta,
            };
        }
    }
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.angle - dtheta, best.angle + dtheta);
    let mut x1 = b - invphi * (b - a);
    let mut x2 = a + invphi * (b - a);
    let (mut f1, mut f2) = (modulus(x1), modulus(x2));
    for _ in 0..80 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = modulus(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = modulus(x2);
        }
    }
    for (x, f) in [(x1, f1), (x2, f2)] {
        if f > best.value {
            best = SupNorm {
                value: f,
                angle: x.rem_euclid(TAU),
            };
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinWalshReport {
    pub sup_norm: f64,
    pub degree: usize,
    /// `M·(|z - c|/R)^n - |p(z)|` per probe.
    pub margins: Vec<f64>,
    /// Bounds `M·(|z - c|/R)^n` per probe.
    pub bounds: Vec<f64>,
}

impl BernsteinWalshReport {
    /// No margin below `-1e-9` times its bound.
    pub fn holds(&self) -> bool {
        self.margins
            .iter()
            .zip(&self.bounds)
            .all(|(m, b)| *m >= -BW_RELATIVE_TOL * b)
    }
}

/// `|p(z)| <= ‖p‖·|z|^n` outside the closed unit disc.
pub fn bernstein_walsh_check(
    p: &PolynomialC,
    probes: &[Complex64],
) -> Result<BernsteinWalshReport> {
    bernstein_walsh_check_on(p, c64(0.0, 0.0), 1.0, probes)
}

/// `|p(z)| <= ‖p‖·exp(n·g(z, ∞))` outside the closed disc `|z - c| <= R`,
/// where `g(z, ∞) = log(|z - c|/R)`.
pub fn bernstein_walsh_check_on(
    p: &PolynomialC,
    center: Complex64,
    radius: f64,
    probes: &[Complex64],
) -> Result<BernsteinWalshReport> {
    let sup = sup_norm_on_circle(p, center, radius, 1024)?.value;
    let n = p.degree();
    let mut margins = Vec::with_capacity(probes.len());
    let mut bounds = Vec::with_capacity(probes.len());
    for &z in probes {
        let rho = (z - center).norm() / radius;
        if rho.is_nan() || rho <= 1.0 {
            return Err(Error::ProbeInsideDisc(z));
        }
        let bound = sup * rho.powi(n as i32);
        bounds.push(bound);
        margins.push(bound - poly_eval(p, z).norm());
    }
    Ok(BernsteinWalshReport {
        sup_norm: sup,
        degree: n,
        margins,
        bounds,
    })
}
