use num_complex::Complex64;

use super::point::{c64, ExtPoint};
use crate::error::{Error, Result};

const DEGENERACY_TOL: f64 = 1e-12;

/// The linear fractional map `z -> (a z + b) / (c z + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

fn is_degenerate(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let scale = [a, b, c, d].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let det = a * d - b * c;
    !(scale.is_finite() && det.is_finite()) || det.norm() <= DEGENERACY_TOL * scale * scale
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if is_degenerate(a, b, c, d) {
            return Err(Error::DegenerateMap);
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: c64(1.0, 0.0),
            b: c64(0.0, 0.0),
            c: c64(0.0, 0.0),
            d: c64(1.0, 0.0),
        }
    }

    /// The Cayley map `(z - i) / (z + i)` from the upper half-plane onto the unit disc.
    pub fn cayley() -> Self {
        Self {
            a: c64(1.0, 0.0),
            b: c64(0.0, -1.0),
            c: c64(1.0, 0.0),
            d: c64(0.0, 1.0),
        }
    }

    /// `z -> scale * z + shift`.
    pub fn affine(scale: Complex64, shift: Complex64) -> Result<Self> {
        Self::new(scale, shift, c64(0.0, 0.0), c64(1.0, 0.0))
    }

    pub fn rotation(angle: f64) -> Self {
        Self {
            a: Complex64::from_polar(1.0, angle),
            b: c64(0.0, 0.0),
            c: c64(0.0, 0.0),
            d: c64(1.0, 0.0),
        }
    }

    /// Disc automorphism `(z - p) / (1 - conj(p) z)` sending `p` to 0; needs `|p| < 1`.
    pub fn disc_automorphism(p: Complex64) -> Result<Self> {
        if p.norm() >= 1.0 {
            return Err(Error::param("p", "disc automorphism needs |p| < 1"));
        }
        Self::new(c64(1.0, 0.0), -p, -p.conj(), c64(1.0, 0.0))
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, z: ExtPoint) -> ExtPoint {
        match z {
            ExtPoint::Infinity => {
                if self.c == c64(0.0, 0.0) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(self.a / self.c)
                }
            }
            ExtPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == c64(0.0, 0.0) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Applies the map to a finite point; `None` when `z` is the pole.
    pub fn apply_finite(&self, z: Complex64) -> Option<Complex64> {
        self.apply(ExtPoint::Finite(z)).finite()
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    /// `self ∘ inner`, i.e. the 2x2 coefficient matrix product.
    pub fn compose(&self, inner: &MoebiusMap) -> MoebiusMap {
        let a = self.a * inner.a + self.b * inner.c;
        let b = self.a * inner.b + self.b * inner.d;
        let c = self.c * inner.a + self.d * inner.c;
        let d = self.c * inner.b + self.d * inner.d;
        // rescale so repeated composition neither overflows nor underflows
        let s = [a, b, c, d].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let s = if s > 0.0 && s.is_finite() { s } else { 1.0 };
        MoebiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: ExtPoint, b: Complex64, tol: f64) -> bool {
        matches!(a, ExtPoint::Finite(z) if (z - b).norm() <= tol)
    }

    #[test]
    fn cayley_sends_i_to_origin_and_zero_to_minus_one() {
        let phi = MoebiusMap::cayley();
        assert!(close(phi.apply(c64(0.0, 1.0).into()), c64(0.0, 0.0), 1e-15));
        assert!(close(
            phi.apply(c64(0.0, 0.0).into()),
            c64(-1.0, 0.0),
            1e-15
        ));
    }

    #[test]
    fn identity_fixes_points() {
        let z = c64(2.0, 3.0);
        assert_eq!(MoebiusMap::identity().apply(z.into()), ExtPoint::Finite(z));
        assert_eq!(
            MoebiusMap::identity().inverse().unwrap(),
            MoebiusMap::identity()
        );
    }

    #[test]
    fn infinity_and_pole() {
        let phi = MoebiusMap::cayley();
        assert!(close(phi.apply(ExtPoint::Infinity), c64(1.0, 0.0), 0.0));
        assert_eq!(phi.apply(c64(0.0, -1.0).into()), ExtPoint::Infinity);
        let scale = MoebiusMap::affine(c64(2.0, 0.0), c64(0.0, 0.0)).unwrap();
        assert_eq!(scale.apply(ExtPoint::Infinity), ExtPoint::Infinity);
    }

    #[test]
    fn inverse_of_cayley_maps_origin_to_i() {
        let psi = MoebiusMap::cayley().inverse().unwrap();
        assert!(close(psi.apply(c64(0.0, 0.0).into()), c64(0.0, 1.0), 1e-15));
    }

    #[test]
    fn inverse_of_scaling_halves() {
        let m = MoebiusMap::affine(c64(2.0, 0.0), c64(0.0, 0.0)).unwrap();
        let n = m.inverse().unwrap();
        assert!(close(n.apply(c64(3.0, -1.0).into()), c64(1.5, -0.5), 1e-15));
    }

    #[test]
    fn degenerate_maps_are_rejected() {
        let one = c64(1.0, 0.0);
        assert!(matches!(
            MoebiusMap::new(one, one, one, one),
            Err(Error::DegenerateMap)
        ));
        assert!(MoebiusMap::new(one, c64(1.0, 1e-15), one, one).is_err());
    }
}
