//! Grid box-cover estimates of `p`-dimensional Hausdorff content for point
//! clouds, and the comparison with logarithmic capacity.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{SQRT_2, TAU};

use num_complex::Complex64;

use crate::equilibrium::{capacity, NodeSystem};
use crate::error::{Error, Result};

/// Largest node count handed to the capacity optimizer.
const CAPACITY_NODES: usize = 400;
pub const H_POSITIVE_THRESHOLD: f64 = 0.1;
pub const CAPACITY_ZERO_THRESHOLD: f64 = 1e-3;
/// Relative drop tolerated between consecutive raw estimates before the
/// profile is flagged as non-monotone.
const MONOTONE_SLACK: f64 = 0.15;

#[derive(Clone, Debug, PartialEq)]
pub enum CloudSource {
    Explicit,
    PolylineSample {
        vertices: Vec<Complex64>,
        n: usize,
    },
    CircleSample {
        center: Complex64,
        radius: f64,
        n: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Complex64>,
    source: CloudSource,
    lower: Complex64,
    upper: Complex64,
}

impl PointCloud {
    fn build(points: Vec<Complex64>, source: CloudSource) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("points", "cloud is empty"));
        }
        if points
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::param("points", "points must be finite"));
        }
        let mut lower = points[0];
        let mut upper = points[0];
        for z in &points {
            lower = Complex64::new(lower.re.min(z.re), lower.im.min(z.im));
            upper = Complex64::new(upper.re.max(z.re), upper.im.max(z.im));
        }
        Ok(Self {
            points,
            source,
            lower,
            upper,
        })
    }

    pub fn explicit(points: Vec<Complex64>) -> Result<Self> {
        Self::build(points, CloudSource::Explicit)
    }

    /// `n >= 2` points equally spaced by arclength, both ends included.
    pub fn polyline_sample(vertices: Vec<Complex64>, n: usize) -> Result<Self> {
        if vertices.len() < 2 || n < 2 {
            return Err(Error::param(
                "polyline",
                "need at least 2 vertices and 2 samples",
            ));
        }
        let lens: Vec<f64> = vertices.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
        let total: f64 = lens.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::param("polyline", "polyline has zero length"));
        }
        let mut points = Vec::with_capacity(n);
        let (mut edge, mut start) = (0, 0.0);
        for k in 0..n {
            let s = total * k as f64 / (n - 1) as f64;
            while edge + 1 < lens.len() && s > start + lens[edge] {
                start += lens[edge];
                edge += 1;
            }
            let frac = if lens[edge] > 0.0 {
                ((s - start) / lens[edge]).clamp(0.0, 1.0)
            } else {
                0.0
            };
            points.push(vertices[edge] + (vertices[edge + 1] - vertices[edge]) * frac);
        }
        Self::build(points, CloudSource::PolylineSample { vertices, n })
    }

    pub fn segment_sample(a: Complex64, b: Complex64, n: usize) -> Result<Self> {
        Self::polyline_sample(vec![a, b], n)
    }

    pub fn circle_sample(center: Complex64, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRadius(radius));
        }
        let points = (0..n)
            .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64))
            .collect();
        Self::build(points, CloudSource::CircleSample { center, radius, n })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn source(&self) -> &CloudSource {
        &self.source
    }

    /// Lower-left and upper-right corners of the bounding box.
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        (self.lower, self.upper)
    }

    /// Diagonal of the bounding box.
    pub fn extent(&self) -> f64 {
        (self.upper - self.lower).norm()
    }

    /// The cloud multiplied by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let source = match &self.source {
            CloudSource::Explicit => CloudSource::Explicit,
            CloudSource::PolylineSample { vertices, n } => CloudSource::PolylineSample {
                vertices: vertices.iter().map(|v| v * factor).collect(),
                n: *n,
            },
            CloudSource::CircleSample { center, radius, n } => CloudSource::CircleSample {
                center: center * factor,
                radius: radius * factor.abs(),
                n: *n,
            },
        };
        Self::build(self.points.iter().map(|z| z * factor).collect(), source)
    }

    fn all_coincide(&self) -> bool {
        self.lower == self.upper
    }

    /// Node system on the same geometry for the capacity computation.
    fn node_system(&self) -> Result<Option<NodeSystem>> {
        if self.all_coincide() {
            return Ok(None);
        }
        match &self.source {
            CloudSource::CircleSample { center, radius, n } => Ok(Some(NodeSystem::circle(
                *center,
                *radius,
                (*n).min(CAPACITY_NODES),
            )?)),
            CloudSource::PolylineSample { vertices, n } if vertices.len() == 2 => Ok(Some(
                NodeSystem::segment(vertices[0], vertices[1], (*n).min(CAPACITY_NODES))?,
            )),
            CloudSource::PolylineSample { vertices, n } => Ok(Some(NodeSystem::polyline(
                vertices.clone(),
                (*n).min(CAPACITY_NODES),
            )?)),
            CloudSource::Explicit => Err(Error::Unsupported(
                "capacity needs a circle or polyline sample with known element lengths".into(),
            )),
        }
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p <= 4.0 {
        Ok(())
    } else {
        Err(Error::param("p", format!("must lie in (0, 4], got {p}")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            "delta",
            format!("must be positive, got {delta}"),
        ))
    }
}

/// Number of cells of the `delta`-grid anchored at the bounding-box corner
/// that contain a point of the cloud.
/// Grid index of a scaled coordinate. Points within rounding of a grid line
/// go to the upper cell, so the assignment does not depend on the scale.
fn cell_index(q: f64) -> i64 {
    let nearest = q.round();
    if (q - nearest).abs() <= 1e-9 * nearest.abs().max(1.0) {
        nearest as i64
    } else {
        q.floor() as i64
    }
}

pub fn box_count(cloud: &PointCloud, delta: f64) -> Result<usize> {
    check_delta(delta)?;
    let cells: HashSet<(i64, i64)> = cloud
        .points
        .iter()
        .map(|z| {
            (
                cell_index((z.re - cloud.lower.re) / delta),
                cell_index((z.im - cloud.lower.im) / delta),
            )
        })
        .collect();
    Ok(cells.len())
}

/// `N(δ)·(δ√2)^p`: the occupied grid cells as a cover by squares of
/// diameter `δ√2`.
pub fn box_cover_estimate(cloud: &PointCloud, p: f64, delta: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(box_count(cloud, delta)? as f64 * (delta * SQRT_2).powf(p))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HausdorffEstimate {
    pub p: f64,
    /// Strictly descending.
    pub deltas: Vec<f64>,
    pub counts: Vec<usize>,
    /// `N(δ)·(δ√2)^p` per delta.
    pub raw: Vec<f64>,
    /// Smallest raw estimate over this and all finer deltas. A cover at a
    /// finer scale is admissible at a coarser one, so this is the tighter
    /// bound and is non-decreasing as `δ` decreases.
    pub values: Vec<f64>,
    /// Value at the finest delta.
    pub extrapolated: f64,
    /// `false` when some raw estimate drops by more than the slack as `δ`
    /// decreases.
    pub raw_monotone: bool,
}

/// Largest nearest-neighbour spacing if it exceeds `limit`, found with a
/// grid hash of cell size `limit`.
fn spacing_violation(points: &[Complex64], limit: f64) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let key = |z: &Complex64| ((z.re / limit).floor() as i64, (z.im / limit).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, z) in points.iter().enumerate() {
        grid.entry(key(z)).or_default().push(i);
    }
    let isolated = points.iter().enumerate().find(|(i, z)| {
        let (cx, cy) = key(z);
        !(-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                grid.get(&(cx + dx, cy + dy)).is_some_and(|cell| {
                    cell.iter()
                        .any(|&j| j != *i && (points[j] - **z).norm() <= limit)
                })
            })
        })
    })?;
    let (i, z) = isolated;
    let nearest = points
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, w)| (w - z).norm())
        .fold(f64::INFINITY, f64::min);
    Some(nearest)
}

/// Box-cover estimates over a descending list of at least three deltas
/// spanning a decade or more.
pub fn hausdorff_profile(cloud: &PointCloud, p: f64, deltas: &[f64]) -> Result<HausdorffEstimate> {
    check_exponent(p)?;
    if deltas.len() < 3 {
        return Err(Error::param("deltas", "need at least 3 values"));
    }
    for &d in deltas {
        check_delta(d)?;
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::param("deltas", "must be strictly descending"));
    }
    let finest = deltas[deltas.len() - 1];
    if deltas[0] < 10.0 * finest {
        return Err(Error::param("deltas", "must span at least one decade"));
    }
    if !cloud.all_coincide() {
        if let Some(spacing) = spacing_violation(&cloud.points, finest / 2.0) {
            return Err(Error::UndersampledCloud {
                spacing,
                delta: finest,
            });
        }
    }
    let counts: Vec<usize> = deltas
        .iter()
        .map(|&d| box_count(cloud, d))
        .collect::<Result<_>>()?;
    let raw: Vec<f64> = counts
        .iter()
        .zip(deltas)
        .map(|(&n, &d)| n as f64 * (d * SQRT_2).powf(p))
        .collect();
    let mut values = raw.clone();
    for k in (0..values.len() - 1).rev() {
        values[k] = values[k].min(values[k + 1]);
    }
    let raw_monotone = raw
        .windows(2)
        .all(|w| w[1] >= (1.0 - MONOTONE_SLACK) * w[0]);
    Ok(HausdorffEstimate {
        p,
        deltas: deltas.to_vec(),
        counts,
        extrapolated: values[values.len() - 1],
        raw,
        values,
        raw_monotone,
    })
}

/// Seven deltas from a tenth to a thousandth of the cloud extent, or fixed
/// deltas for a single point.
pub fn default_deltas(cloud: &PointCloud) -> Vec<f64> {
    let extent = cloud.extent();
    if extent == 0.0 {
        return vec![0.1, 0.01, 0.001];
    }
    (0..7)
        .map(|k| extent * 10f64.powf(-1.0 - 2.0 * k as f64 / 6.0))
        .collect()
}

/// Least-squares slope of `ln N(δ)` against `ln(1/δ)`.
pub fn box_dimension(cloud: &PointCloud, deltas: &[f64]) -> Result<f64> {
    if deltas.len() < 2 {
        return Err(Error::param("deltas", "need at least 2 values"));
    }
    let xs: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
    let ys: Vec<f64> = deltas
        .iter()
        .map(|&d| box_count(cloud, d).map(|n| (n as f64).ln()))
        .collect::<Result<_>>()?;
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("deltas", "need at least two distinct values"));
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityHausdorffReport {
    pub p: f64,
    pub h_estimate: f64,
    pub capacity_estimate: f64,
    /// Not (`h_estimate > 0.1` and `capacity_estimate < 1e-3`).
    pub consistent: bool,
    /// `None` for a single atom, whose content vanishes at every scale.
    pub profile: Option<HausdorffEstimate>,
}

/// Compares the box-cover content with the equilibrium capacity of the
/// same set: positive `p`-content should force positive capacity.
pub fn capacity_hausdorff_report(cloud: &PointCloud, p: f64) -> Result<CapacityHausdorffReport> {
    check_exponent(p)?;
    let (h_estimate, capacity_estimate, profile) = if cloud.all_coincide() {
        // one cell of any diameter covers the atom, so H_p = 0; the atom is polar
        (0.0, 0.0, None)
    } else {
        let ns = cloud.node_system()?.expect("cloud has distinct points");
        let profile = hausdorff_profile(cloud, p, &default_deltas(cloud))?;
        (profile.extrapolated, capacity(&ns)?, Some(profile))
    };
    Ok(CapacityHausdorffReport {
        p,
        h_estimate,
        capacity_estimate,
        consistent: !(h_estimate > H_POSITIVE_THRESHOLD
            && capacity_estimate < CAPACITY_ZERO_THRESHOLD),
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::c64;

    fn unit_segment(n: usize) -> PointCloud {
        PointCloud::segment_sample(c64(0.0, 0.0), c64(1.0, 0.0), n).unwrap()
    }

    #[test]
    fn single_point_is_one_cell() {
        let c = PointCloud::explicit(vec![c64(0.3, -0.2)]).unwrap();
        for &d in &[1.0, 0.1, 1e-5] {
            assert!((box_cover_estimate(&c, 1.0, d).unwrap() - SQRT_2 * d).abs() < 1e-15);
        }
    }

    #[test]
    fn segment_estimates() {
        let c = unit_segment(10_000);
        let h1 = box_cover_estimate(&c, 1.0, 1e-2).unwrap();
        assert!((h1 - SQRT_2).abs() < 0.1 * SQRT_2, "{h1}");
        let h2 = box_cover_estimate(&c, 2.0, 1e-2).unwrap();
        assert!((h2 - 2e-2).abs() < 0.1 * 2e-2, "{h2}");
        assert!(box_cover_estimate(&c, 2.0, 1e-3).unwrap() < h2);
    }

    #[test]
    fn invalid_arguments() {
        let c = unit_segment(100);
        assert!(box_cover_estimate(&c, 0.0, 0.1).is_err());
        assert!(box_cover_estimate(&c, 4.5, 0.1).is_err());
        assert!(box_cover_estimate(&c, 1.0, 0.0).is_err());
        assert!(hausdorff_profile(&c, 1.0, &[0.1, 0.05]).is_err());
        assert!(hausdorff_profile(&c, 1.0, &[0.1, 0.05, 0.02]).is_err());
        assert!(hausdorff_profile(&c, 1.0, &[0.1, 0.2, 0.01]).is_err());
        assert!(PointCloud::explicit(vec![]).is_err());
    }

    #[test]
    fn undersampled_cloud_is_rejected() {
        let c = unit_segment(101);
        match hausdorff_profile(&c, 1.0, &[0.1, 0.03, 0.001]) {
            Err(Error::UndersampledCloud { spacing, delta }) => {
                assert!((spacing - 0.01).abs() < 1e-12);
                assert_eq!(delta, 0.001);
            }
            other => panic!("expected UndersampledCloud, got {other:?}"),
        }
    }

    #[test]
    fn envelope_is_monotone_and_tracks_raw() {
        let c = unit_segment(10_000);
        let deltas = [0.1, 0.03, 0.01, 0.003, 0.001];
        for &p in &[0.5, 1.0, 1.5] {
            let e = hausdorff_profile(&c, p, &deltas).unwrap();
            assert!(e.values.windows(2).all(|w| w[1] >= w[0]));
            assert!(e.values.iter().zip(&e.raw).all(|(v, r)| v <= r));
            assert_eq!(e.extrapolated, *e.raw.last().unwrap());
        }
    }

    #[test]
    fn default_deltas_span_two_decades() {
        let d = default_deltas(&unit_segment(10));
        assert_eq!(d.len(), 7);
        assert!((d[0] / d[6] - 100.0).abs() < 1e-9);
        assert_eq!(
            default_deltas(&PointCloud::explicit(vec![c64(1.0, 1.0)]).unwrap()),
            vec![0.1, 0.01, 0.001]
        );
    }

    #[test]
    fn single_atom_report() {
        let c = PointCloud::explicit(vec![c64(2.0, 2.0)]).unwrap();
        let r = capacity_hausdorff_report(&c, 0.7).unwrap();
        assert_eq!((r.h_estimate, r.capacity_estimate), (0.0, 0.0));
        assert!(r.consistent);
        let two = PointCloud::explicit(vec![c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap();
        assert!(matches!(
            capacity_hausdorff_report(&two, 1.0),
            Err(Error::Unsupported(_))
        ));
    }
}
