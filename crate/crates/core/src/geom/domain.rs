use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::point::ExtPoint;
use crate::error::{Error, Result};

/// A simple, positively oriented polygon with its arclength table.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Complex64>,
    /// `cumulative[k]` is the arclength from vertex 0 to vertex `k`; the last
    /// entry is the perimeter.
    cumulative: Vec<f64>,
}

impl Polygon {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain(format!(
                "polygon needs at least 3 vertices, got {n}"
            )));
        }
        if vertices
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidDomain("non-finite polygon vertex".into()));
        }
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for k in 0..n {
            let len = (vertices[(k + 1) % n] - vertices[k]).norm();
            if len == 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "zero-length edge at vertex {k}"
                )));
            }
            cumulative.push(cumulative[k] + len);
        }
        let poly = Self {
            vertices,
            cumulative,
        };
        if poly.signed_area() <= 0.0 {
            return Err(Error::InvalidDomain(
                "polygon must be positively oriented (counter-clockwise)".into(),
            ));
        }
        if let Some((i, j)) = poly.self_intersection() {
            return Err(Error::InvalidDomain(format!(
                "polygon edges {i} and {j} intersect"
            )));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn perimeter(&self) -> f64 {
        self.cumulative[self.vertices.len()]
    }

    fn edge(&self, k: usize) -> (Complex64, Complex64) {
        let n = self.vertices.len();
        (self.vertices[k], self.vertices[(k + 1) % n])
    }

    fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|k| {
                let (a, b) = self.edge(k);
                a.re * b.im - b.re * a.im
            })
            .sum::<f64>()
            / 2.0
    }

    fn self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (p1, p2) = self.edge(i);
                let (q1, q2) = self.edge(j);
                if adjacent {
                    // adjacent edges share exactly one vertex; reject folding back
                    let shared = if j == i + 1 { p2 } else { p1 };
                    let (u, v) = if j == i + 1 { (p1, q2) } else { (p2, q1) };
                    let cross =
                        (u - shared).re * (v - shared).im - (u - shared).im * (v - shared).re;
                    let dot = (u - shared).re * (v - shared).re + (u - shared).im * (v - shared).im;
                    if cross == 0.0 && dot > 0.0 {
                        return Some((i, j));
                    }
                } else if segments_intersect(p1, p2, q1, q2) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Even-odd crossing test; boundary points may land on either side.
    fn crossing_inside(&self, z: Complex64) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for k in 0..n {
            let (a, b) = self.edge(k);
            if (a.im > z.im) != (b.im > z.im) {
                let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Distance to the boundary, nearest point, and its boundary parameter.
    /// The first edge attaining the minimum wins, which realizes the
    /// smallest-parameter tie break.
    fn project(&self, z: Complex64) -> (f64, Complex64, f64) {
        let mut best = (f64::INFINITY, self.vertices[0], 0.0);
        for k in 0..self.vertices.len() {
            let (a, b) = self.edge(k);
            let e = b - a;
            let s = (((z - a) * e.conj()).re / e.norm_sqr()).clamp(0.0, 1.0);
            let w = a + e * s;
            let d = (z - w).norm();
            if d < best.0 {
                let len = self.cumulative[k + 1] - self.cumulative[k];
                let mut t = (self.cumulative[k] + s * len) / self.perimeter();
                if t >= 1.0 {
                    t = 0.0;
                }
                best = (d, w, t);
            }
        }
        best
    }

    fn point_at(&self, t: f64) -> Complex64 {
        let target = t.rem_euclid(1.0) * self.perimeter();
        let n = self.vertices.len();
        let k = match self.cumulative[1..].iter().position(|&c| c > target) {
            Some(k) => k,
            None => n - 1,
        };
        let (a, b) = self.edge(k);
        let len = self.cumulative[k + 1] - self.cumulative[k];
        a + (b - a) * ((target - self.cumulative[k]) / len)
    }
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re)
        && p.re <= a.re.max(b.re)
        && p.im >= a.im.min(b.im)
        && p.im <= a.im.max(b.im)
}

fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// A planar domain with a canonical boundary parameterization `t ∈ [0, 1)`.
///
/// * `Disc` and `DiscComplement`: `center + radius·e^{2πit}` (counter-clockwise).
/// * `UpperHalfPlane`: `t -> tan(π(t - 1/2))`, with `t = 0` the point at infinity.
/// * `Polygon`: arclength-proportional, vertex 0 at `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    Disc { center: Complex64, radius: f64 },
    UpperHalfPlane,
    DiscComplement { center: Complex64, radius: f64 },
    Polygon(Polygon),
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidRadius(radius))
    }
}

fn unit_angle(v: Complex64) -> f64 {
    let t = v.arg().rem_euclid(TAU) / TAU;
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

impl DomainSpec {
    pub fn disc(center: Complex64, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(DomainSpec::Disc { center, radius })
    }

    pub fn unit_disc() -> Self {
        DomainSpec::Disc {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn disc_complement(center: Complex64, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(DomainSpec::DiscComplement { center, radius })
    }

    pub fn polygon(vertices: Vec<Complex64>) -> Result<Self> {
        Ok(DomainSpec::Polygon(Polygon::new(vertices)?))
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, DomainSpec::Disc { .. } | DomainSpec::Polygon(_))
    }

    /// Largest distance between two boundary points; infinite when unbounded.
    pub fn diameter(&self) -> f64 {
        match self {
            DomainSpec::Disc { radius, .. } => 2.0 * radius,
            DomainSpec::Polygon(p) => {
                let v = p.vertices();
                v.iter()
                    .flat_map(|a| v.iter().map(move |b| (a - b).norm()))
                    .fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        }
    }

    /// `true` when increasing `t` traverses the boundary with the domain on
    /// the left. The disc complement is the only negatively oriented variant.
    pub fn positively_oriented(&self) -> bool {
        !matches!(self, DomainSpec::DiscComplement { .. })
    }

    /// Strict interior test.
    pub fn contains(&self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match self {
            DomainSpec::Disc { center, radius } => (z - center).norm() < *radius,
            DomainSpec::UpperHalfPlane => z.im > 0.0,
            DomainSpec::DiscComplement { center, radius } => (z - center).norm() > *radius,
            DomainSpec::Polygon(p) => p.crossing_inside(z) && p.project(z).0 > 0.0,
        }
    }

    fn ensure_inside(&self, z: Complex64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::PointOutsideDomain(z))
        }
    }

    /// Unsigned distance to the boundary without the interior check.
    pub(crate) fn raw_distance(&self, z: Complex64) -> f64 {
        match self {
            DomainSpec::Disc { center, radius } => (radius - (z - center).norm()).abs(),
            DomainSpec::UpperHalfPlane => z.im.abs(),
            DomainSpec::DiscComplement { center, radius } => ((z - center).norm() - radius).abs(),
            DomainSpec::Polygon(p) => p.project(z).0,
        }
    }

    /// Nearest boundary point and its parameter, without the interior check.
    pub(crate) fn raw_projection(&self, z: Complex64) -> (Complex64, f64) {
        match self {
            DomainSpec::Disc { center, radius } | DomainSpec::DiscComplement { center, radius } => {
                let v = z - center;
                let r = v.norm();
                if r == 0.0 {
                    (center + radius, 0.0)
                } else {
                    let w = center + v * (radius / r);
                    (w, unit_angle(v))
                }
            }
            DomainSpec::UpperHalfPlane => {
                let w = Complex64::new(z.re, 0.0);
                (w, z.re.atan() / PI + 0.5)
            }
            DomainSpec::Polygon(p) => {
                let (_, w, t) = p.project(z);
                (w, t)
            }
        }
    }

    pub fn distance_to_boundary(&self, z: Complex64) -> Result<f64> {
        self.ensure_inside(z)?;
        Ok(self.raw_distance(z))
    }

    pub fn nearest_boundary_point(&self, z: Complex64) -> Result<Complex64> {
        self.ensure_inside(z)?;
        Ok(self.raw_projection(z).0)
    }

    pub fn boundary_point(&self, t: f64) -> ExtPoint {
        let t = t.rem_euclid(1.0);
        match self {
            DomainSpec::Disc { center, radius } | DomainSpec::DiscComplement { center, radius } => {
                ExtPoint::Finite(center + Complex64::from_polar(*radius, TAU * t))
            }
            DomainSpec::UpperHalfPlane => {
                if t == 0.0 {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(Complex64::new((PI * (t - 0.5)).tan(), 0.0))
                }
            }
            DomainSpec::Polygon(p) => ExtPoint::Finite(p.point_at(t)),
        }
    }

    /// Parameter of the boundary point closest to `w`; inverse of
    /// [`boundary_point`](Self::boundary_point) on the boundary.
    pub fn boundary_parameter(&self, w: ExtPoint) -> f64 {
        match w {
            ExtPoint::Infinity => 0.0,
            ExtPoint::Finite(w) => self.raw_projection(w).1,
        }
    }

    /// Outward unit normal at a boundary point of a disc-like domain,
    /// pointing away from the domain.
    pub(crate) fn outward_normal(&self, w: Complex64) -> Option<Complex64> {
        match self {
            DomainSpec::Disc { center, .. } => Some((w - center) / (w - center).norm()),
            DomainSpec::DiscComplement { center, .. } => Some(-(w - center) / (w - center).norm()),
            DomainSpec::UpperHalfPlane => Some(Complex64::new(0.0, -1.0)),
            DomainSpec::Polygon(_) => None,
        }
    }
}

/// A half-open arc `[t0, t1)` of a domain boundary in the canonical
/// parameterization. `t0 > t1` wraps through `t = 0`; `(0, 1)` is the whole
/// boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryArc {
    pub domain: DomainSpec,
    pub t0: f64,
    pub t1: f64,
}

impl BoundaryArc {
    pub fn new(domain: DomainSpec, t0: f64, t1: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&t0) || !(0.0..=1.0).contains(&t1) {
            return Err(Error::param(
                "arc",
                format!("parameters ({t0}, {t1}) outside [0, 1)"),
            ));
        }
        if t0 == t1 {
            return Err(Error::param("arc", "empty arc"));
        }
        Ok(Self { domain, t0, t1 })
    }

    pub fn full(domain: DomainSpec) -> Self {
        Self {
            domain,
            t0: 0.0,
            t1: 1.0,
        }
    }

    pub fn is_full(&self) -> bool {
        self.t0 == 0.0 && self.t1 == 1.0
    }

    /// Parameter length of the arc, in `(0, 1]`.
    pub fn fraction(&self) -> f64 {
        if self.t1 > self.t0 {
            self.t1 - self.t0
        } else {
            1.0 - self.t0 + self.t1
        }
    }

    pub fn contains_parameter(&self, t: f64) -> bool {
        if self.is_full() {
            return true;
        }
        if self.t0 < self.t1 {
            t >= self.t0 && t < self.t1
        } else {
            t >= self.t0 || t < self.t1
        }
    }

    /// The complementary arc `[t1, t0)`; `None` for the full boundary.
    pub fn complement(&self) -> Option<Self> {
        if self.is_full() {
            return None;
        }
        let t0 = if self.t1 >= 1.0 { 0.0 } else { self.t1 };
        Some(Self {
            domain: self.domain.clone(),
            t0,
            t1: self.t0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::c64;

    fn square() -> DomainSpec {
        DomainSpec::polygon(vec![
            c64(0.0, 0.0),
            c64(4.0, 0.0),
            c64(4.0, 4.0),
            c64(0.0, 4.0),
        ])
        .unwrap()
    }

    /// Brute-force distance over a dense boundary sample.
    fn sampled_distance(d: &DomainSpec, z: Complex64, n: usize) -> f64 {
        (0..n)
            .filter_map(|k| d.boundary_point(k as f64 / n as f64).finite())
            .map(|w| (w - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(
            DomainSpec::unit_disc()
                .distance_to_boundary(c64(0.0, 0.0))
                .unwrap(),
            1.0
        );
        assert_eq!(
            DomainSpec::UpperHalfPlane
                .distance_to_boundary(c64(3.0, 2.0))
                .unwrap(),
            2.0
        );
        let sq = square();
        let d = sq.distance_to_boundary(c64(1.0, 2.0)).unwrap();
        assert_eq!(d, 1.0);
        assert!((sampled_distance(&sq, c64(1.0, 2.0), 16_000) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nearest_point_examples() {
        let w = DomainSpec::unit_disc()
            .nearest_boundary_point(c64(0.5, 0.0))
            .unwrap();
        assert_eq!(w, c64(1.0, 0.0));
        let w = DomainSpec::UpperHalfPlane
            .nearest_boundary_point(c64(3.0, 2.0))
            .unwrap();
        assert_eq!(w, c64(3.0, 0.0));
        let w = square().nearest_boundary_point(c64(1.0, 2.0)).unwrap();
        assert_eq!(w, c64(0.0, 2.0));
        // center of the disc: all boundary points tie, smallest parameter wins
        let w = DomainSpec::unit_disc()
            .nearest_boundary_point(c64(0.0, 0.0))
            .unwrap();
        assert_eq!(w, c64(1.0, 0.0));
        // center of the square ties on all edges; bottom edge has the smallest t
        let w = square().nearest_boundary_point(c64(2.0, 2.0)).unwrap();
        assert_eq!(w, c64(2.0, 0.0));
    }

    #[test]
    fn outside_points_are_rejected() {
        let d = DomainSpec::unit_disc();
        assert!(matches!(
            d.distance_to_boundary(c64(1.0, 0.0)),
            Err(Error::PointOutsideDomain(_))
        ));
        assert!(d.nearest_boundary_point(c64(2.0, 0.0)).is_err());
        assert!(DomainSpec::UpperHalfPlane
            .distance_to_boundary(c64(0.0, -1.0))
            .is_err());
        assert!(square().distance_to_boundary(c64(4.0, 2.0)).is_err());
        assert!(square().distance_to_boundary(c64(5.0, 2.0)).is_err());
        let ext = DomainSpec::disc_complement(c64(0.0, 0.0), 1.0).unwrap();
        assert!(ext.distance_to_boundary(c64(0.5, 0.0)).is_err());
        assert_eq!(ext.distance_to_boundary(c64(3.0, 0.0)).unwrap(), 2.0);
    }

    #[test]
    fn boundary_point_examples() {
        let d = DomainSpec::unit_disc();
        assert_eq!(d.boundary_point(0.0), ExtPoint::Finite(c64(1.0, 0.0)));
        let w = d.boundary_point(0.25).finite().unwrap();
        assert!((w - c64(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(
            DomainSpec::UpperHalfPlane.boundary_point(0.5),
            ExtPoint::Finite(c64(0.0, 0.0))
        );
        assert_eq!(
            DomainSpec::UpperHalfPlane.boundary_point(0.0),
            ExtPoint::Infinity
        );
        assert_eq!(
            square().boundary_point(0.0),
            ExtPoint::Finite(c64(0.0, 0.0))
        );
        assert_eq!(
            square().boundary_point(0.375),
            ExtPoint::Finite(c64(4.0, 2.0))
        );
    }

    #[test]
    fn boundary_parameter_inverts_boundary_point() {
        let domains = [
            DomainSpec::disc(c64(1.0, -2.0), 3.0).unwrap(),
            DomainSpec::UpperHalfPlane,
            DomainSpec::disc_complement(c64(0.5, 0.5), 2.0).unwrap(),
            square(),
        ];
        for d in &domains {
            for k in 1..40 {
                let t = k as f64 / 40.0;
                let back = d.boundary_parameter(d.boundary_point(t));
                assert!((back - t).abs() < 1e-12, "{d:?} t={t} back={back}");
            }
        }
    }

    #[test]
    fn disc_closed_form_matches_boundary_scan() {
        let d = DomainSpec::disc(c64(0.3, -0.2), 1.5).unwrap();
        for z in [c64(0.3, -0.2), c64(1.0, 0.1), c64(-0.7, -0.9)] {
            let exact = d.distance_to_boundary(z).unwrap();
            assert!((exact - sampled_distance(&d, z, 200_000)).abs() < 1e-9);
        }
    }

    #[test]
    fn polygon_validation() {
        assert!(DomainSpec::polygon(vec![c64(0.0, 0.0), c64(1.0, 0.0)]).is_err());
        // clockwise
        assert!(DomainSpec::polygon(vec![
            c64(0.0, 0.0),
            c64(0.0, 1.0),
            c64(1.0, 1.0),
            c64(1.0, 0.0)
        ])
        .is_err());
        // bow tie
        assert!(DomainSpec::polygon(vec![
            c64(0.0, 0.0),
            c64(2.0, 2.0),
            c64(2.0, 0.0),
            c64(0.0, 2.0)
        ])
        .is_err());
        // L shape is fine
        let l = DomainSpec::polygon(vec![
            c64(0.0, 0.0),
            c64(2.0, 0.0),
            c64(2.0, 1.0),
            c64(1.0, 1.0),
            c64(1.0, 2.0),
            c64(0.0, 2.0),
        ])
        .unwrap();
        assert!(l.contains(c64(0.5, 1.5)));
        assert!(!l.contains(c64(1.5, 1.5)));
    }

    #[test]
    fn arcs() {
        let d = DomainSpec::unit_disc();
        let arc = BoundaryArc::new(d.clone(), 0.75, 0.25).unwrap();
        assert!((arc.fraction() - 0.5).abs() < 1e-15);
        assert!(arc.contains_parameter(0.9) && arc.contains_parameter(0.1));
        assert!(!arc.contains_parameter(0.5));
        let c = arc.complement().unwrap();
        assert!(c.contains_parameter(0.5) && !c.contains_parameter(0.0));
        assert!(BoundaryArc::new(d.clone(), 0.3, 0.3).is_err());
        assert!(BoundaryArc::new(d, 1.2, 0.3).is_err());
    }
}
