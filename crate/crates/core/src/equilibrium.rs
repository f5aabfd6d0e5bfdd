//! Equilibrium measures and capacity of node systems.
//!
//! The equilibrium weights minimize the discrete energy `wᵀKw` over the
//! probability simplex, where `K` is the kernel of
//! [`energy`](crate::potential::energy). The minimizer is found by projected
//! gradient descent: each iteration tries a Barzilai–Borwein step (the first
//! one `1/‖K‖∞`), then halves it until the Armijo condition holds, so the
//! energy never increases.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::{potential_eval, DiscreteMeasure, SEGMENT_SELF_ENERGY};

pub const DEFAULT_MAX_ITERS: usize = 5000;
pub const DEFAULT_TOL: f64 = 1e-8;

const ARMIJO: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const MAX_BACKTRACKS: usize = 40;
/// Nodes lighter than this are ignored by the Frostman equality residual.
const SUPPORT_WEIGHT: f64 = 1e-6;
/// Open-path nodes this many elements from an endpoint are ignored by the
/// Frostman equality residual.
const ENDPOINT_EXCLUSION: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    Circle {
        center: Complex64,
        radius: f64,
        n: usize,
    },
    Segment {
        a: Complex64,
        b: Complex64,
        n: usize,
    },
    Polyline {
        vertices: Vec<Complex64>,
        n: usize,
    },
    PolygonBoundary {
        vertices: Vec<Complex64>,
        n: usize,
    },
    Explicit,
}

/// Discretized support of a candidate equilibrium measure.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSystem {
    nodes: Vec<Complex64>,
    element_lengths: Vec<f64>,
    generator: Generator,
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("n", "need at least one node"))
    } else {
        Ok(())
    }
}

/// `n` nodes at the midpoints of equal-arclength cells along a path.
fn path_nodes(
    vertices: &[Complex64],
    closed: bool,
    n: usize,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let mut pts = vertices.to_vec();
    if closed {
        pts.push(vertices[0]);
    }
    let lens: Vec<f64> = pts.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let total: f64 = lens.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::param("vertices", "path has zero length"));
    }
    let cell = total / n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut edge = 0;
    let mut start = 0.0;
    for k in 0..n {
        let s = (k as f64 + 0.5) * cell;
        while edge + 1 < lens.len() && s > start + lens[edge] {
            start += lens[edge];
            edge += 1;
        }
        let frac = if lens[edge] > 0.0 {
            (s - start) / lens[edge]
        } else {
            0.0
        };
        nodes.push(pts[edge] + (pts[edge + 1] - pts[edge]) * frac.clamp(0.0, 1.0));
    }
    Ok((nodes, vec![cell; n]))
}

impl NodeSystem {
    /// `n` equally spaced points `center + radius·e^{2πik/n}` with `ℓ = 2πr/n`.
    pub fn circle(center: Complex64, radius: f64, n: usize) -> Result<Self> {
        check_count(n)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRadius(radius));
        }
        let nodes = (0..n)
            .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64))
            .collect();
        Ok(Self {
            nodes,
            element_lengths: vec![TAU * radius / n as f64; n],
            generator: Generator::Circle { center, radius, n },
        })
    }

    /// Midpoints of `n` equal cells of `[a, b]`; the cells are the Voronoi
    /// elements of the nodes and their lengths sum to `|b - a|`.
    pub fn segment(a: Complex64, b: Complex64, n: usize) -> Result<Self> {
        check_count(n)?;
        let (nodes, element_lengths) = path_nodes(&[a, b], false, n)?;
        Ok(Self {
            nodes,
            element_lengths,
            generator: Generator::Segment { a, b, n },
        })
    }

    pub fn polyline(vertices: Vec<Complex64>, n: usize) -> Result<Self> {
        check_count(n)?;
        if vertices.len() < 2 {
            return Err(Error::param(
                "vertices",
                "polyline needs at least 2 vertices",
            ));
        }
        let (nodes, element_lengths) = path_nodes(&vertices, false, n)?;
        Ok(Self {
            nodes,
            element_lengths,
            generator: Generator::Polyline { vertices, n },
        })
    }

    /// Equal-arclength cell midpoints on a closed polygon.
    pub fn polygon_boundary(vertices: Vec<Complex64>, n: usize) -> Result<Self> {
        check_count(n)?;
        if vertices.len() < 3 {
            return Err(Error::param(
                "vertices",
                "polygon needs at least 3 vertices",
            ));
        }
        let (nodes, element_lengths) = path_nodes(&vertices, true, n)?;
        Ok(Self {
            nodes,
            element_lengths,
            generator: Generator::PolygonBoundary { vertices, n },
        })
    }

    pub fn explicit(nodes: Vec<Complex64>, element_lengths: Vec<f64>) -> Result<Self> {
        if nodes.len() != element_lengths.len() {
            return Err(Error::param("element_lengths", "one length per node"));
        }
        if nodes
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::param("nodes", "nodes must be finite"));
        }
        if element_lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::param("element_lengths", "lengths must be positive"));
        }
        Ok(Self {
            nodes,
            element_lengths,
            generator: Generator::Explicit,
        })
    }

    /// Support and element lengths of an existing measure.
    pub fn from_measure(mu: &DiscreteMeasure) -> Self {
        Self {
            nodes: mu.nodes().to_vec(),
            element_lengths: mu.element_lengths().to_vec(),
            generator: Generator::Explicit,
        }
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

    pub fn element_lengths(&self) -> &[f64] {
        &self.element_lengths
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Image under `z -> a z + b`; element lengths scale by `|a|`.
    pub fn affine(&self, a: Complex64, b: Complex64) -> Self {
        let s = a.norm();
        let map = |z: &Complex64| a * z + b;
        let generator = match &self.generator {
            Generator::Circle { center, radius, n } => Generator::Circle {
                center: map(center),
                radius: radius * s,
                n: *n,
            },
            Generator::Segment { a: p, b: q, n } => Generator::Segment {
                a: map(p),
                b: map(q),
                n: *n,
            },
            Generator::Polyline { vertices, n } => Generator::Polyline {
                vertices: vertices.iter().map(map).collect(),
                n: *n,
            },
            Generator::PolygonBoundary { vertices, n } => Generator::PolygonBoundary {
                vertices: vertices.iter().map(map).collect(),
                n: *n,
            },
            Generator::Explicit => Generator::Explicit,
        };
        Self {
            nodes: self.nodes.iter().map(map).collect(),
            element_lengths: self.element_lengths.iter().map(|l| l * s).collect(),
            generator,
        }
    }

    /// Nodes that take part in the Frostman equality residual.
    fn frostman_mask(&self) -> Vec<bool> {
        let n = self.len();
        let open = matches!(
            self.generator,
            Generator::Segment { .. } | Generator::Polyline { .. }
        );
        (0..n)
            .map(|i| !open || (i >= ENDPOINT_EXCLUSION && i + ENDPOINT_EXCLUSION < n))
            .collect()
    }
}

/// Dense symmetric kernel `K_ij = -log|x_i - x_j|`, `K_ii = 3/2 - log ℓ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn kernel_matrix(ns: &NodeSystem) -> Result<KernelMatrix> {
    let n = ns.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = ns.nodes[i];
            (0..n)
                .map(|j| {
                    if i == j {
                        Ok(SEGMENT_SELF_ENERGY - ns.element_lengths[i].ln())
                    } else {
                        let d = (xi - ns.nodes[j]).norm();
                        if d == 0.0 {
                            Err(Error::DuplicateNodes(i.min(j), i.max(j)))
                        } else {
                            Ok(-d.ln())
                        }
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(KernelMatrix {
        n,
        data: rows.concat(),
    })
}

/// Euclidean projection onto `{w >= 0, Σw = 1}` (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cumulative += x;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if x - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumResult {
    pub measure: DiscreteMeasure,
    pub energy: f64,
    pub capacity: f64,
    /// Largest `|(Kw)_i - energy|` over support nodes.
    pub frostman_residual: f64,
    pub projected_gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Energy after each accepted iterate, starting with the uniform weights.
    pub energy_history: Vec<f64>,
}

fn projected_gradient_norm(w: &[f64], g: &[f64]) -> f64 {
    let step: Vec<f64> = w.iter().zip(g).map(|(w, g)| w - g).collect();
    project_simplex(&step)
        .iter()
        .zip(w)
        .map(|(p, w)| (p - w) * (p - w))
        .sum::<f64>()
        .sqrt()
}

/// Minimizes `wᵀKw` over the simplex starting from uniform weights.
///
/// Convergence means `‖P(w - ∇) - w‖₂ <= tol`. When that is not reached the
/// best iterate comes back inside [`Error::NotConverged`].
pub fn minimize_energy(ns: &NodeSystem, max_iters: usize, tol: f64) -> Result<EquilibriumResult> {
    let n = ns.len();
    if n < 2 {
        return Err(Error::param(
            "nodes",
            format!("need at least 2 nodes, got {n}"),
        ));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::param("tol", "must be positive"));
    }
    let k = kernel_matrix(ns)?;
    let first_step = 1.0 / k.norm_inf();

    let mut w = vec![1.0 / n as f64; n];
    let mut kw = k.matvec(&w);
    let mut f = dot(&w, &kw);
    let mut history = vec![f];
    let mut step = first_step;
    let mut iterations = 0;
    let mut pg_norm;

    loop {
        // the simplex projection ignores constant shifts; removing the common
        // level 2f keeps g·d free of cancellation near the optimum
        let g: Vec<f64> = kw.iter().map(|x| 2.0 * (x - f)).collect();
        pg_norm = projected_gradient_norm(&w, &g);
        if pg_norm <= tol || iterations >= max_iters {
            break;
        }
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = w.iter().zip(&g).map(|(w, g)| w - step * g).collect();
            let next = project_simplex(&trial);
            let d: Vec<f64> = next.iter().zip(&w).map(|(a, b)| a - b).collect();
            if d.iter().all(|&x| x == 0.0) {
                break;
            }
            let kd = k.matvec(&d);
            let slope = dot(&g, &d);
            // f(w + d) - f(w) = d·(g + Kd), free of the cancellation in f(w+d) - f(w)
            let change = dot(
                &d,
                &g.iter().zip(&kd).map(|(g, kd)| g + kd).collect::<Vec<_>>(),
            );
            if change <= ARMIJO * slope {
                accepted = Some((next, d, kd, change));
                break;
            }
            step *= SHRINK;
        }
        let Some((next, d, kd, change)) = accepted else {
            break;
        };
        w = next;
        for (a, b) in kw.iter_mut().zip(&kd) {
            *a += b;
        }
        f += change;
        history.push(f);
        iterations += 1;

        let sy = 2.0 * dot(&d, &kd);
        step = if sy > 0.0 {
            dot(&d, &d) / sy
        } else {
            first_step
        };
    }

    // refresh to remove drift from the incremental updates
    kw = k.matvec(&w);
    let energy = dot(&w, &kw);
    let frostman_residual = ns
        .frostman_mask()
        .iter()
        .zip(w.iter().zip(&kw))
        .filter(|(keep, (wi, _))| **keep && **wi > SUPPORT_WEIGHT)
        .map(|(_, (_, kwi))| (kwi - energy).abs())
        .fold(0.0, f64::max);
    let converged = pg_norm <= tol;
    let measure = DiscreteMeasure::new(ns.nodes.clone(), w, ns.element_lengths.clone())?;
    let result = EquilibriumResult {
        measure,
        energy,
        capacity: (-energy).exp(),
        frostman_residual,
        projected_gradient_norm: pg_norm,
        iterations,
        converged,
        energy_history: history,
    };
    if converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(result)))
    }
}

/// `c(E) = exp(-I(ν))`; empty and single-node systems are polar and get 0.
pub fn capacity(ns: &NodeSystem) -> Result<f64> {
    capacity_with(ns, DEFAULT_MAX_ITERS, DEFAULT_TOL)
}

pub fn capacity_with(ns: &NodeSystem, max_iters: usize, tol: f64) -> Result<f64> {
    if ns.len() < 2 {
        return Ok(0.0);
    }
    Ok(minimize_energy(ns, max_iters, tol)?.capacity)
}

/// `-p_ν(z) - I(ν)` at each probe; `<= 0` up to discretization error
/// everywhere, `≈ 0` on the support.
pub fn frostman_profile(result: &EquilibriumResult, probes: &[Complex64]) -> Vec<f64> {
    probes
        .iter()
        .map(|&z| -potential_eval(&result.measure, z) - result.energy)
        .collect()
}
