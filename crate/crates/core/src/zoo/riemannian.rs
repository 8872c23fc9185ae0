use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, MetricField, MetricFn};
use crate::jets::{dot, Scalar};

/// Riemannian baselines `F = √(a_ij(x) yⁱ yʲ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RiemannianModel {
    /// `a = δ`.
    Flat,
    /// Unit round sphere in the stereographic chart, `a = 4/(1+|x|²)² δ`.
    Sphere,
    /// Poincaré disk (ball), `a = 4/(1-|x|²)² δ`.
    HyperbolicDisk,
    /// A constant SPD matrix.
    Custom { matrix: Vec<Vec<f64>> },
}

impl Default for RiemannianModel {
    fn default() -> Self {
        RiemannianModel::Flat
    }
}

impl RiemannianModel {
    pub fn name(&self) -> &'static str {
        match self {
            RiemannianModel::Flat => "flat",
            RiemannianModel::Sphere => "sphere",
            RiemannianModel::HyperbolicDisk => "hyperbolic_disk",
            RiemannianModel::Custom { .. } => "custom",
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if let RiemannianModel::Custom { matrix } = self {
            if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidParameter(format!("custom matrix must be {n}x{n}")));
            }
            let m = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
            if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) {
                return Err(Error::InvalidParameter("custom matrix is not symmetric".into()));
            }
            if m.cholesky().is_none() {
                return Err(Error::InvalidParameter("custom matrix is not positive definite".into()));
            }
        }
        Ok(())
    }

    pub fn domain(&self, n: usize) -> Domain {
        match self {
            RiemannianModel::HyperbolicDisk => Domain::ball(n, 1.0),
            _ => Domain::everywhere(n),
        }
    }

    /// `a_ij(x) yⁱ yʲ`.
    pub fn quadratic<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        match self {
            RiemannianModel::Flat => dot(y, y),
            RiemannianModel::Sphere => {
                let c = (dot(x, x) + 1.0).square().recip() * 4.0;
                dot(y, y) * c
            }
            RiemannianModel::HyperbolicDisk => {
                let c = (-dot(x, x) + 1.0).square().recip() * 4.0;
                dot(y, y) * c
            }
            RiemannianModel::Custom { matrix } => {
                let mut acc = S::zero();
                for (i, row) in matrix.iter().enumerate() {
                    let mut r = S::zero();
                    for (j, a) in row.iter().enumerate() {
                        r += y[j].clone() * *a;
                    }
                    acc.fma_assign(&y[i], &r);
                }
                acc
            }
        }
    }

    /// `a_ij(x)` as a matrix.
    pub fn matrix(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            RiemannianModel::Flat => DMatrix::identity(n, n),
            RiemannianModel::Sphere => DMatrix::identity(n, n) * (4.0 / (1.0 + r2).powi(2)),
            RiemannianModel::HyperbolicDisk => DMatrix::identity(n, n) * (4.0 / (1.0 - r2).powi(2)),
            RiemannianModel::Custom { matrix } => DMatrix::from_fn(n, n, |i, j| matrix[i][j]),
        }
    }

    /// Dual norm `√(a^{ij} b_i b_j)` of a covector at `x`.
    pub fn dual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        let a = self.matrix(x);
        let b = DVector::from_row_slice(b);
        match a.cholesky() {
            Some(c) => b.dot(&c.solve(&b)).max(0.0).sqrt(),
            None => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone)]
struct RiemannianMetric {
    model: RiemannianModel,
}

impl MetricFn for RiemannianMetric {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        self.model.quadratic(x, y).sqrt()
    }
}

/// `F = √(a_ij(x) yⁱ yʲ)` for one of the [`RiemannianModel`]s.
pub fn riemannian(n: usize, model: &RiemannianModel) -> Result<MetricField> {
    model.validate(n)?;
    MetricField::new(
        format!("riemannian/{}", model.name()),
        n,
        model.domain(n),
        RiemannianMetric { model: model.clone() },
    )
}

/// A Riemannian factor of any dimension, including one, for use as a building
/// block or reference in product constructions.
pub fn riemannian_factor(n: usize, model: &RiemannianModel) -> Result<MetricField> {
    model.validate(n)?;
    Ok(MetricField::factor(
        format!("riemannian/{}", model.name()),
        n,
        model.domain(n),
        RiemannianMetric { model: model.clone() },
    ))
}

/// The Euclidean norm `F = |y|`.
pub fn euclidean(n: usize) -> Result<MetricField> {
    MetricField::new("euclidean", n, Domain::everywhere(n), RiemannianMetric { model: RiemannianModel::Flat })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_matrices() {
        let bad = RiemannianModel::Custom {
            matrix: vec![vec![1.0, 2.0], vec![2.0, 1.0]],
        };
        assert!(riemannian(2, &bad).is_err());
        let asym = RiemannianModel::Custom {
            matrix: vec![vec![1.0, 0.2], vec![0.0, 1.0]],
        };
        assert!(riemannian(2, &asym).is_err());
        assert!(riemannian(1, &RiemannianModel::Flat).is_err());
    }

    #[test]
    fn disk_domain_is_the_unit_ball() {
        let m = riemannian(2, &RiemannianModel::HyperbolicDisk).unwrap();
        assert!(m.sample(&[0.9, 0.0], &[1.0, 0.0]).is_ok());
        assert!(m.sample(&[1.0, 0.1], &[1.0, 0.0]).is_err());
    }
}
