use nalgebra::{DMatrix, DVector};

use super::kernels;
use super::metric::{MetricField, TangentSample};
use crate::error::{Error, Result};
use crate::linalg;

/// `g_ij(x, y)` and its inverse at one tangent sample.
#[derive(Debug, Clone)]
pub struct FundamentalTensor {
    pub g: DMatrix<f64>,
    pub g_inverse: DMatrix<f64>,
    pub at: TangentSample,
}

impl FundamentalTensor {
    /// `𝐠_y(u, v) = g_ij uⁱ vʲ`.
    pub fn inner(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        u.dot(&(&self.g * v))
    }

    pub fn norm(&self, u: &DVector<f64>) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    pub fn lower(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.g * v
    }

    pub fn raise(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.g_inverse * w
    }

    pub fn determinant(&self) -> f64 {
        self.g.determinant()
    }
}

pub(crate) fn to_dmatrix(m: &linalg::Matrix<f64>) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j])
}

/// Fundamental tensor `g_ij = ½ ∂²F²/∂yⁱ∂yʲ`.
pub fn fundamental_tensor(metric: &MetricField, at: &TangentSample) -> Result<FundamentalTensor> {
    let g = kernels::fundamental_kernel::<f64>(metric, &at.x, &at.y)?;
    let chol = linalg::cholesky(&g).ok_or_else(|| Error::DegenerateMetric {
        x: at.x.clone(),
        y: at.y.clone(),
    })?;
    let inv = linalg::spd_inverse(&chol);
    Ok(FundamentalTensor {
        g: to_dmatrix(&g),
        g_inverse: to_dmatrix(&inv),
        at: at.clone(),
    })
}

/// Whether `g_ij(x, y)` is positive definite, without raising an error.
pub fn is_positive_definite(metric: &MetricField, x: &[f64], y: &[f64]) -> bool {
    match kernels::fundamental_kernel::<f64>(metric, x, y) {
        Ok(g) => linalg::cholesky(&g).is_some(),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_is_identity() {
        let m = zoo::euclidean(3).unwrap();
        let at = m.sample(&[0.2, 0.1, -0.3], &[1.0, -2.0, 0.5]).unwrap();
        let t = fundamental_tensor(&m, &at).unwrap();
        assert_relative_eq!(t.g, DMatrix::identity(3, 3), epsilon = 1e-14);
    }

    #[test]
    fn quadratic_form_is_its_own_tensor() {
        let a = vec![vec![2.0, 0.3], vec![0.3, 1.0]];
        let m = zoo::riemannian(2, &zoo::RiemannianModel::Custom { matrix: a.clone() }).unwrap();
        for y in [[1.0, 0.0], [0.3, -2.0], [-1.0, 1.0]] {
            let t = fundamental_tensor(&m, &m.sample(&[0.1, 0.2], &y).unwrap()).unwrap();
            assert_relative_eq!(t.g, to_dmatrix(&a), epsilon = 1e-13);
            let y = DVector::from_row_slice(&y);
            assert_relative_eq!(t.inner(&y, &y), m.value(&[0.1, 0.2], y.as_slice()).powi(2), max_relative = 1e-13);
        }
    }
}
