use std::fmt;

use num_complex::Complex64;

/// Shorthand constructor used throughout the crate and its tests.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A point of the Riemann sphere.
///
/// Only Moebius maps and boundary parameterizations of unbounded domains
/// produce or consume [`ExtPoint::Infinity`]; everything else works on
/// finite [`Complex64`] values, so arithmetic with infinity cannot happen by
/// accident.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinity(self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }
}

impl From<Complex64> for ExtPoint {
    fn from(z: Complex64) -> Self {
        ExtPoint::Finite(z)
    }
}

impl fmt::Display for ExtPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtPoint::Finite(z) => write!(f, "{},{}", z.re, z.im),
            ExtPoint::Infinity => f.write_str("inf"),
        }
    }
}
