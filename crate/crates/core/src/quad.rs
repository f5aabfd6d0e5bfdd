//! Quadrature rules and the smooth radial bump shared by mollifiers and test
//! functions.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = (b - a) / 2.0;
    let mid = (b + a) / 2.0;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Pairwise summation in index order; the result depends only on the input
/// order, never on how the values were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// `exp(-1 / (1 - q))` for `q = |x|^2 / δ^2 < 1`, zero outside.
pub fn bump_profile(q: f64) -> f64 {
    if q >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - q)).exp()
    }
}

/// Laplacian of `x -> bump_profile(|x - c|^2 / R^2)` at squared relative
/// radius `q`.
pub fn bump_laplacian(q: f64, radius: f64) -> f64 {
    if q >= 1.0 {
        return 0.0;
    }
    let f = bump_profile(q);
    let u = 1.0 / (1.0 - q);
    let d1 = -f * u * u;
    let d2 = f * (u.powi(4) - 2.0 * u.powi(3));
    4.0 / (radius * radius) * (d1 + q * d2)
}

/// `∫_{R^2} bump_profile(|x|^2) dm(x) = π ∫_0^1 exp(-1/(1-q)) dq`.
pub fn bump_unit_integral() -> f64 {
    let (q, w) = gauss_legendre(400, 0.0, 1.0);
    PI * q
        .iter()
        .zip(&w)
        .map(|(&q, &w)| w * bump_profile(q))
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8, 0.0, 2.0);
        for k in 0..16 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = 2f64.powi(k + 1) / (k + 1) as f64;
            assert!(
                (q - exact).abs() < 1e-12 * exact,
                "degree {k}: {q} vs {exact}"
            );
        }
        let (x, w) = gauss_legendre(7, -1.0, 1.0);
        assert!(x[3].abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bump_integral_matches_exponential_integral_identity() {
        // π ∫_0^1 e^{-1/(1-q)} dq = π (e^{-1} - E1(1)), E1(1) = 0.219383934395520...
        let expected = PI * ((-1f64).exp() - 0.219_383_934_395_520_3);
        assert!((bump_unit_integral() - expected).abs() < 1e-13);
    }

    #[test]
    fn bump_laplacian_matches_finite_differences() {
        let r = 0.7;
        let g = |x: f64, y: f64| bump_profile((x * x + y * y) / (r * r));
        let h = 1e-4;
        for &(x, y) in &[(0.0, 0.0), (0.2, 0.1), (-0.3, 0.4), (0.5, -0.1)] {
            let fd =
                (g(x + h, y) + g(x - h, y) + g(x, y + h) + g(x, y - h) - 4.0 * g(x, y)) / (h * h);
            let exact = bump_laplacian((x * x + y * y) / (r * r), r);
            assert!((fd - exact).abs() < 1e-5, "({x},{y}): {fd} vs {exact}");
        }
    }

    #[test]
    fn pairwise_sum_is_accurate() {
        let v = vec![0.1; 100_000];
        assert!((pairwise_sum(&v) - 10_000.0).abs() < 1e-9);
    }
}
