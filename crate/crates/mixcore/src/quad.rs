//! Gauss–Legendre quadrature, plus the log-scale rule used for every
//! ∫ g(δ) dδ/δ in the crate.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
/// Newton iteration on the Legendre recurrence; exact for degree ≤ 2n−1.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp;
        loop {
            let mut p0 = 1.0f64;
            let mut p1 = 0.0f64;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if libm::fabs(dz) < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Cached Gauss–Legendre base rule on [−1, 1], mappable to any interval
/// without re-solving for the nodes.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫_{lo}^{hi} g(δ) dδ/δ through the log substitution.
    pub fn integrate_log(&self, lo: f64, hi: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        let a = libm::log(lo);
        let b = libm::log(hi);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&t, &w)| w * half * g(libm::exp(mid + half * t)))
            .sum()
    }
}

/// Quadrature for ∫_{lo}^{hi} g(δ) dδ/δ via Gauss–Legendre in log δ.
#[derive(Debug, Clone)]
pub struct LogQuadrature {
    pub deltas: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LogQuadrature {
    /// 0 < lo < hi required (checked by callers).
    pub fn new(lo: f64, hi: f64, nodes: usize) -> Self {
        let (x, w) = gauss_legendre(nodes);
        let a = libm::log(lo);
        let b = libm::log(hi);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let deltas = x.iter().map(|&t| libm::exp(mid + half * t)).collect();
        let weights = w.iter().map(|&wi| wi * half).collect();
        LogQuadrature { deltas, weights }
    }

    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.deltas.iter().zip(self.weights.iter()).map(|(&d, &w)| w * g(d)).sum()
    }
}

/// Log-spaced sample points, `per_decade` per factor of ten, endpoints included.
pub fn log_spaced(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > lo);
    let decades = libm::log10(hi / lo);
    let count = (libm::ceil(decades * per_decade as f64) as usize).max(1);
    (0..=count)
        .map(|i| lo * libm::pow(hi / lo, i as f64 / count as f64))
        .collect()
}

/// Trapezoid rule for ∫ g dδ/δ over samples that are not necessarily
/// uniformly log-spaced; `points` must be increasing.
pub fn log_trapezoid(points: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(points.len(), values.len());
    let mut acc = 0.0;
    for i in 1..points.len() {
        let dt = libm::log(points[i] / points[i - 1]);
        acc += 0.5 * dt * (values[i] + values[i - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_rule_matches_reference() {
        let (x, w) = gauss_legendre(5);
        // reference values of the 5-point rule
        let xr = [
            -0.906179845938664,
            -0.538469310105683,
            0.0,
            0.538469310105683,
            0.906179845938664,
        ];
        let wr = [
            0.236926885056189,
            0.478628670499366,
            0.568888888888889,
            0.478628670499366,
            0.236926885056189,
        ];
        for i in 0..5 {
            assert!((x[i] - xr[i]).abs() < 1e-14, "node {i}");
            assert!((w[i] - wr[i]).abs() < 1e-14, "weight {i}");
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        // ∫_{-1}^{1} t^10 dt = 2/11, degree 10 < 2·8−1
        let s: f64 = x.iter().zip(w.iter()).map(|(&t, &wi)| wi * libm::pow(t, 10.0)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn log_rule_integrates_d_delta_over_delta() {
        // ∫_a^b dδ/δ = log(b/a)
        let q = LogQuadrature::new(1e-3, 10.0, 32);
        let v = q.integrate(|_| 1.0);
        assert!((v - libm::log(10.0 / 1e-3)).abs() < 1e-12);
        // smooth integrand: ∫ δ dδ/δ = b − a
        let v = q.integrate(|d| d);
        assert!((v - (10.0 - 1e-3)).abs() < 1e-9);
    }

    #[test]
    fn log_spacing_endpoints() {
        let pts = log_spaced(1e-2, 1.0, 16);
        assert!((pts[0] - 1e-2).abs() < 1e-16);
        assert!((pts.last().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pts.len(), 33);
    }
}
