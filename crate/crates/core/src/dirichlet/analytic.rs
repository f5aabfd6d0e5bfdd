use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use super::{BoundaryFunction, RngStream};
use crate::error::{Error, Result};
use crate::geom::{BoundaryArc, DomainSpec, ExtPoint, MoebiusMap};
use crate::quad::pairwise_sum;

const ON_CIRCLE_TOL: f64 = 1e-10;
const MAP_CHECK_TOL: f64 = 1e-8;

fn check_inside_circle(center: Complex64, radius: f64, z: Complex64) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidRadius(radius));
    }
    let r = (z - center).norm();
    if !r.is_finite() || r > radius {
        Err(Error::PointOutsideDomain(z))
    } else if r == radius {
        Err(Error::PointOnBoundary(z))
    } else {
        Ok(r)
    }
}

/// `(R² - |z-c|²) / |w - z|²` for `w` on the circle `|w - c| = R`.
pub fn poisson_kernel(center: Complex64, radius: f64, w: Complex64, z: Complex64) -> Result<f64> {
    let r = check_inside_circle(center, radius, z)?;
    if ((w - center).norm() - radius).abs() > ON_CIRCLE_TOL * radius.max(1.0) {
        return Err(Error::param("w", format!("{w} is not on the circle")));
    }
    Ok((radius * radius - r * r) / (w - z).norm_sqr())
}

/// Poisson integral of `f` over the circle `|w - c| = R`, by the trapezoid
/// rule at `t = k/n`.
pub fn poisson_solve(
    center: Complex64,
    radius: f64,
    f: &BoundaryFunction,
    z: Complex64,
    n_nodes: usize,
) -> Result<f64> {
    if n_nodes < 64 {
        return Err(Error::param(
            "n_nodes",
            format!("need at least 64, got {n_nodes}"),
        ));
    }
    let r = check_inside_circle(center, radius, z)?;
    let terms: Vec<f64> = (0..n_nodes)
        .map(|k| {
            let t = k as f64 / n_nodes as f64;
            let w = center + Complex64::from_polar(radius, TAU * t);
            f.eval_at(w, t) * (radius * radius - r * r) / (w - z).norm_sqr()
        })
        .collect();
    Ok(pairwise_sum(&terms) / n_nodes as f64)
}

/// Harmonic measure of a parameter arc of the circle `|w - c| = R` seen from
/// `z`, in closed form: `θ/π - |arc|/2π`, where `θ` is the angle the arc's
/// chord subtends at `z`.
pub fn harmonic_measure_disc(
    center: Complex64,
    radius: f64,
    z: Complex64,
    arc: &BoundaryArc,
) -> Result<f64> {
    check_inside_circle(center, radius, z)?;
    if arc.is_full() {
        return Ok(1.0);
    }
    let sweep = TAU * arc.fraction();
    let alpha = TAU * arc.t0;
    let a = center + Complex64::from_polar(radius, alpha);
    let b = center + Complex64::from_polar(radius, alpha + sweep);
    let theta = ((b - z) / (a - z)).arg().rem_euclid(TAU);
    Ok((theta / PI - sweep / TAU).clamp(0.0, 1.0))
}

/// `(1/π)(atan((b - x)/y) - atan((a - x)/y))`; infinite bounds allowed.
pub fn harmonic_measure_halfplane(z: Complex64, a: f64, b: f64) -> Result<f64> {
    if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NotInUpperHalfPlane(z));
    }
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(Error::param(
            "interval",
            format!("need a < b, got [{a}, {b}]"),
        ));
    }
    let (x, y) = (z.re, z.im);
    Ok((((b - x) / y).atan() - ((a - x) / y).atan()) / PI)
}

fn halfplane_abscissa(t: f64) -> f64 {
    if t <= 0.0 {
        f64::NEG_INFINITY
    } else if t >= 1.0 {
        f64::INFINITY
    } else {
        (PI * (t - 0.5)).tan()
    }
}

/// Harmonic measure of `arc` seen from `z` in any domain with a closed form
/// (disc, half-plane, disc complement).
pub fn harmonic_measure(domain: &DomainSpec, z: Complex64, arc: &BoundaryArc) -> Result<f64> {
    match domain {
        DomainSpec::Disc { center, radius } => harmonic_measure_disc(*center, *radius, z, arc),
        DomainSpec::UpperHalfPlane => {
            if arc.is_full() {
                return harmonic_measure_halfplane(z, f64::NEG_INFINITY, f64::INFINITY);
            }
            let (a, b) = (halfplane_abscissa(arc.t0), halfplane_abscissa(arc.t1));
            if arc.t0 < arc.t1 {
                harmonic_measure_halfplane(z, a, b)
            } else {
                // the arc passes through infinity
                let right = if a < f64::INFINITY {
                    harmonic_measure_halfplane(z, a, f64::INFINITY)?
                } else {
                    0.0
                };
                let left = if b > f64::NEG_INFINITY {
                    harmonic_measure_halfplane(z, f64::NEG_INFINITY, b)?
                } else {
                    0.0
                };
                Ok(right + left)
            }
        }
        DomainSpec::DiscComplement { center, radius } => {
            if !domain.contains(z) {
                return Err(if (z - center).norm() == *radius {
                    Error::PointOnBoundary(z)
                } else {
                    Error::PointOutsideDomain(z)
                });
            }
            // w -> R/(w - c) sends the exterior onto the unit disc and the
            // boundary parameter t to 1 - t
            let image = Complex64::new(*radius, 0.0) / (z - center);
            let flipped = if arc.is_full() {
                BoundaryArc::full(DomainSpec::unit_disc())
            } else {
                let s0 = (1.0 - arc.t1).rem_euclid(1.0);
                BoundaryArc::new(DomainSpec::unit_disc(), s0, 1.0 - arc.t0)?
            };
            harmonic_measure_disc(Complex64::new(0.0, 0.0), 1.0, image, &flipped)
        }
        DomainSpec::Polygon(_) => Err(Error::Unsupported(
            "no closed-form harmonic measure for polygons; use walk-on-spheres".into(),
        )),
    }
}

/// Exit point `x + y·tan(π(u - 1/2))` of Brownian motion from `z` for the
/// uniform variate `u`.
pub fn exit_from_uniform(z: Complex64, u: f64) -> Result<f64> {
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(Error::NotInUpperHalfPlane(z));
    }
    Ok(z.re + z.im * (PI * (u - 0.5)).tan())
}

pub fn sample_exit_halfplane(z: Complex64, stream: &RngStream) -> Result<f64> {
    let u: f64 = stream.generator().gen();
    exit_from_uniform(z, u)
}

fn boundary_scale(w: Complex64) -> f64 {
    w.norm().max(1.0)
}

/// Harmonic measure of `arc` at `z` computed in the target domain after
/// transporting both by `map`.
pub fn pushforward_measure(
    map: &MoebiusMap,
    source: &DomainSpec,
    target: &DomainSpec,
    z: Complex64,
    arc: &BoundaryArc,
) -> Result<f64> {
    if !source.contains(z) {
        return Err(Error::PointOutsideDomain(z));
    }
    let image_z = match map.apply(ExtPoint::Finite(z)) {
        ExtPoint::Finite(w) if target.contains(w) => w,
        other => {
            return Err(Error::MapDomainMismatch(format!(
                "{z} maps to {other}, outside the target"
            )))
        }
    };
    let probes: Vec<f64> = (0..8).map(|k| (k as f64 + 0.5) / 8.0).collect();
    let mut images = Vec::with_capacity(8);
    for &t in &probes {
        match map.apply(source.boundary_point(t)) {
            ExtPoint::Finite(w) => {
                if target.raw_distance(w) > MAP_CHECK_TOL * boundary_scale(w) {
                    return Err(Error::MapDomainMismatch(format!(
                        "boundary point at t = {t} maps to {w}, off the target boundary"
                    )));
                }
                images.push(target.boundary_parameter(ExtPoint::Finite(w)));
            }
            ExtPoint::Infinity => {
                if target.is_bounded() || matches!(target, DomainSpec::DiscComplement { .. }) {
                    return Err(Error::MapDomainMismatch(format!(
                        "boundary point at t = {t} maps to infinity"
                    )));
                }
                images.push(0.0);
            }
        }
    }
    // total cyclic advance is 1 when the map preserves the parameter direction
    let advance: f64 = (0..8)
        .map(|k| (images[(k + 1) % 8] - images[k]).rem_euclid(1.0))
        .sum();
    let preserved = (advance - 1.0).abs() < 0.5;

    let image_arc = if arc.is_full() {
        BoundaryArc::full(target.clone())
    } else {
        let s0 = target.boundary_parameter(map.apply(source.boundary_point(arc.t0)));
        let s1 = target.boundary_parameter(map.apply(source.boundary_point(arc.t1)));
        let (lo, hi) = if preserved { (s0, s1) } else { (s1, s0) };
        let hi = if hi == 0.0 { 1.0 } else { hi };
        BoundaryArc::new(target.clone(), lo, hi)?
    };
    harmonic_measure(target, image_z, &image_arc)
}
