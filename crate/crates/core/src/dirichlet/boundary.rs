use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{BoundaryArc, DomainSpec, ExtPoint};

/// Bounded boundary data, evaluated at a boundary point together with its
/// canonical parameter `t`.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryFunction {
    Constant(f64),
    Re,
    Im,
    /// `(Re w)²`
    Re2,
    /// Indicator of the half-open parameter arc `[t0, t1)`, wrapping when
    /// `t0 > t1`.
    IndicatorArc {
        t0: f64,
        t1: f64,
    },
    /// Values at strictly increasing parameters in `[0, 1)`, linearly
    /// interpolated and periodic in `t`.
    Sampled {
        params: Vec<f64>,
        values: Vec<f64>,
    },
}

impl BoundaryFunction {
    pub fn indicator(t0: f64, t1: f64) -> Result<Self> {
        // reuse the arc validation
        let arc = BoundaryArc::new(DomainSpec::unit_disc(), t0, t1)?;
        Ok(Self::IndicatorArc {
            t0: arc.t0,
            t1: arc.t1,
        })
    }

    pub fn indicator_of(arc: &BoundaryArc) -> Self {
        Self::IndicatorArc {
            t0: arc.t0,
            t1: arc.t1,
        }
    }

    pub fn sampled(params: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if params.is_empty() || params.len() != values.len() {
            return Err(Error::param(
                "table",
                "need matching, non-empty parameter and value lists",
            ));
        }
        if params.iter().any(|t| !(0.0..1.0).contains(t)) {
            return Err(Error::param("table", "parameters must lie in [0, 1)"));
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param(
                "table",
                "parameters must be strictly increasing",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("table", "values must be finite"));
        }
        Ok(Self::Sampled { params, values })
    }

    pub fn name(&self) -> String {
        match self {
            Self::Constant(c) => format!("const:{c}"),
            Self::Re => "re".into(),
            Self::Im => "im".into(),
            Self::Re2 => "re2".into(),
            Self::IndicatorArc { t0, t1 } => format!("indicator:{t0}:{t1}"),
            Self::Sampled { params, .. } => format!("table[{}]", params.len()),
        }
    }

    pub fn eval_at(&self, w: Complex64, t: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Re => w.re,
            Self::Im => w.im,
            Self::Re2 => w.re * w.re,
            Self::IndicatorArc { t0, t1 } => {
                let inside = if *t0 == 0.0 && *t1 == 1.0 {
                    true
                } else if t0 < t1 {
                    t >= *t0 && t < *t1
                } else {
                    t >= *t0 || t < *t1
                };
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Sampled { params, values } => interpolate(params, values, t),
        }
    }

    pub fn eval(&self, domain: &DomainSpec, w: Complex64) -> f64 {
        self.eval_at(w, domain.boundary_parameter(ExtPoint::Finite(w)))
    }

    /// `sup |f|` over the boundary of `domain`; infinite for unbounded data.
    pub fn sup_norm(&self, domain: &DomainSpec) -> f64 {
        let extent = |part: fn(Complex64) -> f64| match domain {
            DomainSpec::Disc { center, radius } | DomainSpec::DiscComplement { center, radius } => {
                part(*center).abs() + radius
            }
            DomainSpec::Polygon(p) => p
                .vertices()
                .iter()
                .map(|v| part(*v).abs())
                .fold(0.0, f64::max),
            DomainSpec::UpperHalfPlane => f64::INFINITY,
        };
        match self {
            Self::Constant(c) => c.abs(),
            Self::Re => extent(|z| z.re),
            Self::Im => match domain {
                DomainSpec::UpperHalfPlane => 0.0,
                _ => extent(|z| z.im),
            },
            Self::Re2 => extent(|z| z.re).powi(2),
            Self::IndicatorArc { .. } => 1.0,
            Self::Sampled { values, .. } => values.iter().map(|v| v.abs()).fold(0.0, f64::max),
        }
    }
}

fn interpolate(params: &[f64], values: &[f64], t: f64) -> f64 {
    let n = params.len();
    if n == 1 {
        return values[0];
    }
    let t = t.rem_euclid(1.0);
    let k = params.partition_point(|&p| p <= t);
    // the segment [params[i], params[j]] containing t, wrapping past the end
    let (i, j) = if k == 0 || k == n {
        (n - 1, 0)
    } else {
        (k - 1, k)
    };
    let t0 = params[i];
    let mut t1 = params[j];
    let mut s = t;
    if t1 <= t0 {
        t1 += 1.0;
    }
    if s < t0 {
        s += 1.0;
    }
    let frac = (s - t0) / (t1 - t0);
    values[i] + frac * (values[j] - values[i])
}
