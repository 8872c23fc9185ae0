use nalgebra::{DMatrix, DVector};

use super::kernels::{self, SprayKernel};
use super::metric::{MetricField, TangentSample};
use super::tensor::to_dmatrix;
use crate::error::Result;
use crate::jets::{self, Jet1};

/// Spray coefficients `Gⁱ` and nonlinear connection `Nⁱ_j = ∂Gⁱ/∂yʲ`.
#[derive(Debug, Clone)]
pub struct SprayData {
    pub g_coeffs: DVector<f64>,
    pub connection: DMatrix<f64>,
    pub at: TangentSample,
}

impl SprayData {
    /// Divergence `∂Gᵐ/∂yᵐ`.
    pub fn trace(&self) -> f64 {
        self.connection.trace()
    }
}

pub(crate) fn unit_dirs(count: usize, dim: usize, offset: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let mut e = vec![0.0; dim];
            e[offset + k] = 1.0;
            e
        })
        .collect()
}

/// Geodesic spray of `metric` at `at`; geodesics satisfy `σ̈ + 2G(σ, σ̇) = 0`.
pub fn spray(metric: &MetricField, at: &TangentSample) -> Result<SprayData> {
    let n = metric.dimension();
    let ys: Vec<Jet1> = jets::seed(&at.y, &unit_dirs(n, n, 0), 1)?;
    let xs: Vec<Jet1> = at.x.iter().map(|&v| Jet1::constant(v)).collect();
    let SprayKernel { spray, .. } = kernels::spray_kernel(metric, &xs, &ys)?;
    let g_coeffs = DVector::from_iterator(n, spray.iter().map(|g| *g.value()));
    let connection = DMatrix::from_fn(n, n, |i, j| spray[i].d(&[j]));
    Ok(SprayData {
        g_coeffs,
        connection,
        at: at.clone(),
    })
}

/// First and second derivatives of the spray in `x` and `y` at one sample,
/// plus the fundamental tensor. Everything the Riemann operator needs.
#[derive(Debug, Clone)]
pub struct SprayJet {
    pub spray: DVector<f64>,
    /// `∂Gⁱ/∂xᵏ`
    pub dx: DMatrix<f64>,
    /// `Nⁱ_k = ∂Gⁱ/∂yᵏ`
    pub dy: DMatrix<f64>,
    /// `yʲ ∂²Gⁱ/∂xʲ∂yᵏ`
    pub dxy_along_y: DMatrix<f64>,
    /// `∂²Gⁱ/∂yʲ∂yᵏ`, indexed `[i][j][k]`
    pub dyy: Vec<DMatrix<f64>>,
    pub g: DMatrix<f64>,
}

pub fn spray_jet(metric: &MetricField, at: &TangentSample) -> Result<SprayJet> {
    let n = metric.dimension();
    let point: Vec<f64> = at.x.iter().chain(&at.y).copied().collect();
    let mut seeded: Vec<Jet1> = jets::seed(&point, &unit_dirs(2 * n, 2 * n, 0), 2)?;
    let ys = seeded.split_off(n);
    let SprayKernel { spray, g } = kernels::spray_kernel(metric, &seeded, &ys)?;
    let y = &at.y;
    let dx = DMatrix::from_fn(n, n, |i, k| spray[i].d(&[k]));
    let dy = DMatrix::from_fn(n, n, |i, k| spray[i].d(&[n + k]));
    let dxy_along_y = DMatrix::from_fn(n, n, |i, k| {
        (0..n).map(|j| y[j] * spray[i].d(&[j, n + k])).sum()
    });
    let dyy = (0..n)
        .map(|i| DMatrix::from_fn(n, n, |j, k| spray[i].d(&[n + j, n + k])))
        .collect();
    let g_real: Vec<Vec<f64>> = g.iter().map(|r| r.iter().map(|v| *v.value()).collect()).collect();
    Ok(SprayJet {
        spray: DVector::from_iterator(n, spray.iter().map(|s| *s.value())),
        dx,
        dy,
        dxy_along_y,
        dyy,
        g: to_dmatrix(&g_real),
    })
}

/// Largest `|∂³Gⁱ/∂yʲ∂yᵏ∂yˡ|`; zero exactly when the spray is quadratic in `y`
/// (a Berwald metric).
pub fn berwald_defect(metric: &MetricField, at: &TangentSample) -> Result<f64> {
    let n = metric.dimension();
    let ys: Vec<Jet1> = jets::seed(&at.y, &unit_dirs(n, n, 0), 3)?;
    let xs: Vec<Jet1> = at.x.iter().map(|&v| Jet1::constant(v)).collect();
    let SprayKernel { spray, .. } = kernels::spray_kernel(metric, &xs, &ys)?;
    let mut worst = 0.0f64;
    for gi in &spray {
        for j in 0..n {
            for k in j..n {
                for l in k..n {
                    worst = worst.max(gi.d(&[j, k, l]).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use approx::assert_relative_eq;

    #[test]
    fn minkowski_spray_vanishes() {
        let m = zoo::minkowski(3, 0.5, &[0.2, 0.0, -0.1]).unwrap();
        let at = m.sample(&[0.3, -0.4, 0.1], &[1.0, 0.5, -0.7]).unwrap();
        let s = spray(&m, &at).unwrap();
        assert!(s.g_coeffs.amax() < 1e-13);
        assert!(s.connection.amax() < 1e-13);
    }

    #[test]
    fn hyperbolic_disk_spray_matches_christoffel_closed_form() {
        // conformal factor e^{2u}, u = ln(2/(1-|x|²)): Gⁱ = (∇u·y) yⁱ - ½|y|² ∂ᵢu
        let m = zoo::riemannian(2, &zoo::RiemannianModel::HyperbolicDisk).unwrap();
        let x = [0.3, -0.2];
        let y = [0.7, 1.1];
        let s = spray(&m, &m.sample(&x, &y).unwrap()).unwrap();
        let q = 1.0 - (x[0] * x[0] + x[1] * x[1]);
        let du = [2.0 * x[0] / q, 2.0 * x[1] / q];
        let duy = du[0] * y[0] + du[1] * y[1];
        let yy = y[0] * y[0] + y[1] * y[1];
        for i in 0..2 {
            assert_relative_eq!(s.g_coeffs[i], duy * y[i] - 0.5 * yy * du[i], max_relative = 1e-12);
        }
        // Euler relation for degree-2 homogeneity
        let ny = &s.connection * DVector::from_row_slice(&y);
        assert_relative_eq!(ny, &s.g_coeffs * 2.0, max_relative = 1e-12);
    }
}
