//! Integration over the Euclidean unit sphere `S^{n-1}`.
//!
//! * `n = 2`: periodic trapezoid rule (spectrally accurate for smooth integrands).
//! * `n = 3`: Gauss–Legendre in `cos θ` times a trapezoid rule in the azimuth.
//! * `n ≥ 4`: quasi–Monte Carlo on Halton points mapped to the sphere, with a
//!   batch-means standard error.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Circle nodes for `n = 2`.
pub const CIRCLE_NODES: usize = 512;
/// `(cos θ, azimuth)` node counts for `n = 3`.
pub const SPHERE_NODES: (usize, usize) = (64, 128);
/// Point count for `n ≥ 4`.
pub const QMC_POINTS: usize = 1 << 16;
const QMC_BATCHES: usize = 16;

#[derive(Debug)]
pub struct SphereRule {
    pub dimension: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Batch count for standard-error estimation (QMC only).
    pub batches: Option<usize>,
}

/// An integral estimate and its error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl SphereRule {
    /// Integrate `f` over the sphere; the error is the batch standard error for
    /// QMC rules and the difference to the half-resolution rule otherwise.
    pub fn integrate_many<const K: usize>(&self, mut f: impl FnMut(&[f64]) -> [f64; K]) -> [Estimate; K] {
        let values: Vec<[f64; K]> = self.nodes.iter().map(|v| f(v)).collect();
        let mut out = [Estimate { value: 0.0, error: 0.0 }; K];
        for c in 0..K {
            let total: f64 = values.iter().zip(&self.weights).map(|(v, w)| v[c] * w).sum();
            let error = match self.batches {
                Some(b) => {
                    let per = self.nodes.len() / b;
                    let scale = b as f64;
                    let means: Vec<f64> = (0..b)
                        .map(|k| {
                            (k * per..(k + 1) * per)
                                .map(|i| values[i][c] * self.weights[i] * scale)
                                .sum::<f64>()
                        })
                        .collect();
                    let mean = means.iter().sum::<f64>() / b as f64;
                    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b as f64 - 1.0);
                    (var / b as f64).sqrt()
                }
                None => 0.0,
            };
            out[c] = Estimate { value: total, error };
        }
        out
    }
}

/// Surface area of `S^{n-1}`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

/// Volume of the Euclidean unit ball in `Rⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn circle_rule(count: usize) -> SphereRule {
    let w = 2.0 * PI / count as f64;
    let nodes = (0..count)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / count as f64;
            vec![a.cos(), a.sin()]
        })
        .collect();
    SphereRule {
        dimension: 2,
        nodes,
        weights: vec![w; count],
        batches: None,
    }
}

fn sphere_rule(polar: usize, azimuth: usize) -> SphereRule {
    let (z, wz) = gauss_legendre(polar);
    let wa = 2.0 * PI / azimuth as f64;
    let mut nodes = Vec::with_capacity(polar * azimuth);
    let mut weights = Vec::with_capacity(polar * azimuth);
    for (zi, wi) in z.iter().zip(&wz) {
        let r = (1.0 - zi * zi).sqrt();
        for k in 0..azimuth {
            let a = 2.0 * PI * (k as f64 + 0.5) / azimuth as f64;
            nodes.push(vec![r * a.cos(), r * a.sin(), *zi]);
            weights.push(wi * wa);
        }
    }
    SphereRule {
        dimension: 3,
        nodes,
        weights,
        batches: None,
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn qmc_rule(n: usize, count: usize) -> SphereRule {
    let pairs = n.div_ceil(2);
    assert!(2 * pairs <= PRIMES.len(), "QMC rule supports n <= {}", PRIMES.len());
    let w = sphere_area(n) / count as f64;
    // batches are interleaved so each one is itself a spread-out point set
    let per = count / QMC_BATCHES;
    let mut nodes = vec![Vec::new(); count];
    for i in 0..count {
        let idx = (i + 1) as u64;
        let mut g = Vec::with_capacity(2 * pairs);
        for p in 0..pairs {
            let u1 = radical_inverse(idx, PRIMES[2 * p]).max(1e-300);
            let u2 = radical_inverse(idx, PRIMES[2 * p + 1]);
            let r = (-2.0 * u1.ln()).sqrt();
            g.push(r * (2.0 * PI * u2).cos());
            g.push(r * (2.0 * PI * u2).sin());
        }
        g.truncate(n);
        let len = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.iter_mut().for_each(|v| *v /= len);
        let batch = i % QMC_BATCHES;
        nodes[batch * per + i / QMC_BATCHES] = g;
    }
    SphereRule {
        dimension: n,
        nodes,
        weights: vec![w; count],
        batches: Some(QMC_BATCHES),
    }
}

type RuleCache = Mutex<HashMap<(usize, bool), &'static SphereRule>>;

/// Shared rule for `S^{n-1}`; `coarse` selects the half-resolution companion
/// used for error estimation of the deterministic rules.
pub fn rule(n: usize, coarse: bool) -> &'static SphereRule {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("quadrature cache poisoned");
    map.entry((n, coarse)).or_insert_with(|| {
        let r = match (n, coarse) {
            (2, false) => circle_rule(CIRCLE_NODES),
            (2, true) => circle_rule(CIRCLE_NODES / 2),
            (3, false) => sphere_rule(SPHERE_NODES.0, SPHERE_NODES.1),
            (3, true) => sphere_rule(SPHERE_NODES.0 / 2, SPHERE_NODES.1 / 2),
            (_, false) => qmc_rule(n, QMC_POINTS),
            (_, true) => qmc_rule(n, QMC_POINTS / 4),
        };
        Box::leak(Box::new(r))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = w.iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(m, 2.0 / 15.0, epsilon = 1e-14);
    }

    #[test]
    fn areas() {
        for n in 2..=6 {
            let r = rule(n, false);
            let s: f64 = r.weights.iter().sum();
            assert_relative_eq!(s, sphere_area(n), max_relative = 1e-10);
        }
        assert_relative_eq!(unit_ball_volume(3), 4.0 / 3.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn second_moments() {
        // ∮ v_0² dΩ = area / n
        for n in 2..=5 {
            let [e] = rule(n, false).integrate_many(|v| [v[0] * v[0]]);
            let tol = if n >= 4 { 5.0 * e.error + 1e-3 } else { 1e-12 };
            assert!((e.value - sphere_area(n) / n as f64).abs() < tol, "n={n}: {e:?}");
        }
    }
}
