//! Chebyshev–Lobatto grids and spectral differentiation.

use std::f64::consts::PI;

/// Default number of grid nodes per trace.
pub const NODES: usize = 257;

/// `N + 1` Chebyshev–Lobatto nodes on `[a, b]`, increasing.
pub fn lobatto_nodes(count: usize, a: f64, b: f64) -> Vec<f64> {
    let n = count - 1;
    (0..count)
        .map(|k| {
            if k == 0 {
                a
            } else if k == n {
                b
            } else {
                a + 0.5 * (b - a) * (1.0 - (PI * k as f64 / n as f64).cos())
            }
        })
        .collect()
}

/// Spectral differentiation on a Lobatto grid over `[a, b]`.
#[derive(Debug, Clone)]
pub struct Differentiator {
    n: usize,
    matrix: Vec<f64>,
}

impl Differentiator {
    pub fn new(count: usize, a: f64, b: f64) -> Self {
        let n = count - 1;
        // nodes x_k = -cos(πk/N) increase from -1 to 1
        let x: Vec<f64> = (0..count).map(|k| -(PI * k as f64 / n as f64).cos()).collect();
        let c = |k: usize| if k == 0 || k == n { 2.0 } else { 1.0 };
        let mut m = vec![0.0; count * count];
        for i in 0..count {
            let mut row_sum = 0.0;
            for j in 0..count {
                if i != j {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    let v = c(i) / c(j) * sign / (x[i] - x[j]);
                    m[i * count + j] = v;
                    row_sum += v;
                }
            }
            m[i * count + i] = -row_sum;
        }
        let scale = 2.0 / (b - a);
        m.iter_mut().for_each(|v| *v *= scale);
        Differentiator { n: count, matrix: m }
    }

    /// Derivative of samples taken at [`lobatto_nodes`].
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.matrix[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(f)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Derivative of each component of a vector-valued sequence.
    pub fn apply_vectors(&self, f: &[Vec<f64>]) -> Vec<Vec<f64>> {
        if f.is_empty() {
            return Vec::new();
        }
        let dim = f[0].len();
        let cols: Vec<Vec<f64>> = (0..dim)
            .map(|c| self.apply(&f.iter().map(|v| v[c]).collect::<Vec<_>>()))
            .collect();
        (0..f.len()).map(|k| cols.iter().map(|c| c[k]).collect()).collect()
    }
}

/// Chebyshev coefficients of samples on a Lobatto grid (type-I cosine transform).
pub fn coefficients(f: &[f64]) -> Vec<f64> {
    let n = f.len() - 1;
    (0..=n)
        .map(|k| {
            let mut s = 0.0;
            for (j, v) in f.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                // nodes are ordered by -cos, hence the (-1)^k factor
                s += w * v * (PI * (k * j) as f64 / n as f64).cos();
            }
            let ck = if k == 0 || k == n { 1.0 } else { 2.0 };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * ck * s / n as f64
        })
        .collect()
}

/// Estimated absolute error of the spectral derivative: the size of the
/// trailing Chebyshev coefficients, amplified by `N²` and the interval scale.
pub fn derivative_error(f: &[f64], a: f64, b: f64) -> f64 {
    let c = coefficients(f);
    let n = c.len() - 1;
    let tail = c[n.saturating_sub(8)..].iter().map(|v| v.abs()).fold(0.0, f64::max);
    tail * (n * n) as f64 * 2.0 / (b - a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differentiates_smooth_functions() {
        let t = lobatto_nodes(65, 0.0, 3.0);
        let d = Differentiator::new(65, 0.0, 3.0);
        let f: Vec<f64> = t.iter().map(|v| (2.0 * v).sin()).collect();
        let df = d.apply(&f);
        for (v, g) in t.iter().zip(df) {
            assert!((g - 2.0 * (2.0 * v).cos()).abs() < 1e-10);
        }
        assert!(derivative_error(&f, 0.0, 3.0) < 1e-10);
    }

    #[test]
    fn coefficients_of_a_polynomial() {
        // T_2(x) = 2x² − 1 on [-1, 1]
        let t = lobatto_nodes(9, -1.0, 1.0);
        let f: Vec<f64> = t.iter().map(|x| 2.0 * x * x - 1.0).collect();
        let c = coefficients(&f);
        assert!((c[2] - 1.0).abs() < 1e-14);
        assert!(c.iter().enumerate().filter(|(k, _)| *k != 2).all(|(_, v)| v.abs() < 1e-14));
    }
}
