//! Circle and disc averages, radial mollification, and submean checks.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{bump_profile, bump_unit_integral, gauss_legendre};

/// Default node count for circle means.
pub const SURFACE_NODES: usize = 512;
/// Margin below which the submean inequality counts as violated.
pub const SUBMEAN_TOL: f64 = -1e-7;

const MOLLIFY_RADIAL: usize = 64;
const MOLLIFY_ANGULAR: usize = 128;

/// A real field on the plane with values in `[-∞, ∞)`.
#[derive(Clone)]
pub struct ScalarField {
    label: String,
    eval: Arc<dyn Fn(Complex64) -> f64 + Send + Sync>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("label", &self.label)
            .finish()
    }
}

impl ScalarField {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(Complex64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> f64 {
        (self.eval)(z)
    }

    /// Evaluates and rejects `+∞` and NaN.
    pub fn eval_checked(&self, z: Complex64) -> Result<f64> {
        let v = self.eval(z);
        if v.is_nan() || v == f64::INFINITY {
            Err(Error::InvalidFieldValue { at: z, value: v })
        } else {
            Ok(v)
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const:{c}"), move |_| c)
    }

    pub fn re() -> Self {
        Self::new("re", |z| z.re)
    }

    pub fn im() -> Self {
        Self::new("im", |z| z.im)
    }

    /// `Re z²`
    pub fn re_sq() -> Self {
        Self::new("re2", |z| (z * z).re)
    }

    /// `Im z²`
    pub fn im_sq() -> Self {
        Self::new("im2", |z| (z * z).im)
    }

    /// `Re z³`
    pub fn re_cube() -> Self {
        Self::new("re3", |z| (z * z * z).re)
    }

    /// `|z|²`
    pub fn abs_sq() -> Self {
        Self::new("abs2", |z| z.norm_sqr())
    }

    /// `log|z - w|`, equal to `-∞` at `w`.
    pub fn log_abs(w: Complex64) -> Self {
        Self::new(format!("log:{},{}", w.re, w.im), move |z| {
            let d = (z - w).norm();
            if d == 0.0 {
                f64::NEG_INFINITY
            } else {
                d.ln()
            }
        })
    }

    /// `max(Re z, 0)`
    pub fn positive_part_re() -> Self {
        Self::new("maxre", |z| z.re.max(0.0))
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r))
    }
}

/// Trapezoid-rule circle average `(1/2π) ∫ f(center + r e^{it}) dt`.
pub fn surface_mean(f: &ScalarField, center: Complex64, r: f64, n_nodes: usize) -> Result<f64> {
    check_radius(r)?;
    if n_nodes < 16 {
        return Err(Error::param(
            "n_nodes",
            format!("need at least 16, got {n_nodes}"),
        ));
    }
    let mut sum = 0.0;
    let mut singular = false;
    for k in 0..n_nodes {
        let z = center + Complex64::from_polar(r, TAU * k as f64 / n_nodes as f64);
        let v = f.eval_checked(z)?;
        if v == f64::NEG_INFINITY {
            singular = true;
        } else {
            sum += v;
        }
    }
    Ok(if singular {
        f64::NEG_INFINITY
    } else {
        sum / n_nodes as f64
    })
}

/// Disc average `(1/πr²) ∫_{Δ(center,r)} f dm` on a Gauss–Legendre × trapezoid
/// polar grid.
pub fn space_mean(
    f: &ScalarField,
    center: Complex64,
    r: f64,
    n_radial: usize,
    n_angular: usize,
) -> Result<f64> {
    check_radius(r)?;
    if n_radial < 8 {
        return Err(Error::param(
            "n_radial",
            format!("need at least 8, got {n_radial}"),
        ));
    }
    if n_angular < 16 {
        return Err(Error::param(
            "n_angular",
            format!("need at least 16, got {n_angular}"),
        ));
    }
    let (s, ws) = gauss_legendre(n_radial, 0.0, r);
    let mut sum = 0.0;
    for (&s, &w) in s.iter().zip(&ws) {
        let mut ring = 0.0;
        for k in 0..n_angular {
            let v = f.eval_checked(
                center + Complex64::from_polar(s, TAU * k as f64 / n_angular as f64),
            )?;
            if v == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            ring += v;
        }
        sum += w * s * ring * TAU / n_angular as f64;
    }
    Ok(sum / (PI * r * r))
}

/// Closed-form average of `log|z - w|` over the circle `|z| = r`:
/// `log|w|` if `r <= |w|`, `log r` otherwise.
pub fn circle_average_log(r: f64, w: Complex64) -> Result<f64> {
    if r < 0.0 || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    let m = w.norm();
    if r == 0.0 && m == 0.0 {
        return Err(Error::UndefinedAtZero);
    }
    Ok(if r <= m { m.ln() } else { r.ln() })
}

/// The radial bump `χ_δ(x) = C exp(-1 / (1 - |x|²/δ²))` normalized to unit
/// integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MollifierSpec {
    scale: f64,
    normalization: f64,
}

impl MollifierSpec {
    pub fn new(scale: f64) -> Result<Self> {
        check_radius(scale)?;
        let spec = Self {
            scale,
            normalization: 1.0 / (scale * scale * bump_unit_integral()),
        };
        let mass = spec.grid_mass();
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::param(
                "scale",
                format!("mollifier quadrature mass {mass} is not 1 within 1e-8"),
            ));
        }
        Ok(spec)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn eval(&self, x: Complex64) -> f64 {
        self.normalization * bump_profile(x.norm_sqr() / (self.scale * self.scale))
    }

    fn radial_rule(&self) -> (Vec<f64>, Vec<f64>) {
        let (s, w) = gauss_legendre(MOLLIFY_RADIAL, 0.0, self.scale);
        let weights = s
            .iter()
            .zip(&w)
            .map(|(&s, &w)| {
                w * s * self.normalization * bump_profile(s * s / (self.scale * self.scale))
            })
            .collect();
        (s, weights)
    }

    /// Total mass of the kernel on the quadrature grid used by [`mollify`].
    fn grid_mass(&self) -> f64 {
        let (_, w) = self.radial_rule();
        w.iter().sum::<f64>() * TAU
    }
}

/// `(f ∗ χ_δ)(z)` by polar quadrature (64 radial × 128 angular nodes).
pub fn mollify(f: &ScalarField, m: &MollifierSpec, z: Complex64) -> Result<f64> {
    let (s, w) = m.radial_rule();
    let mut total = 0.0;
    for (&s, &w) in s.iter().zip(&w) {
        let mut ring = 0.0;
        for k in 0..MOLLIFY_ANGULAR {
            let p = z + Complex64::from_polar(s, TAU * (k as f64 + 0.5) / MOLLIFY_ANGULAR as f64);
            let v = f.eval_checked(p)?;
            if v == f64::NEG_INFINITY {
                return Err(Error::SingularityInSupport(p));
            }
            ring += v;
        }
        total += w * ring * TAU / MOLLIFY_ANGULAR as f64;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubmeanReport {
    pub radii: Vec<f64>,
    pub margins: Vec<f64>,
    pub holds: Vec<bool>,
}

impl SubmeanReport {
    pub fn all_hold(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

/// `margin(r) = S_f(center, r) - f(center)` with 512 circle nodes; the
/// inequality holds when `margin >= -1e-7`. A center value of `-∞` holds
/// trivially with margin `+∞`.
pub fn submean_check(f: &ScalarField, center: Complex64, radii: &[f64]) -> Result<SubmeanReport> {
    let at_center = f.eval_checked(center)?;
    let mut margins = Vec::with_capacity(radii.len());
    for &r in radii {
        let margin = if at_center == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            surface_mean(f, center, r, SURFACE_NODES)? - at_center
        };
        margins.push(margin);
    }
    let holds = margins.iter().map(|&m| m >= SUBMEAN_TOL).collect();
    Ok(SubmeanReport {
        radii: radii.to_vec(),
        margins,
        holds,
    })
}

/// Circle means at ascending radii; non-decreasing for subharmonic `f`.
pub fn monotone_radial_means(
    f: &ScalarField,
    center: Complex64,
    radii: &[f64],
) -> Result<Vec<f64>> {
    if radii.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("radii", "must be ascending"));
    }
    radii
        .iter()
        .map(|&r| surface_mean(f, center, r, SURFACE_NODES))
        .collect()
}
