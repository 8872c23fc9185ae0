use nalgebra::{DMatrix, DVector};

use super::metric::{MetricField, TangentSample};
use super::spray::{spray_jet, SprayJet};
use crate::error::{Error, Result};

/// Flags whose normalized Gram determinant falls below this are rejected.
pub const DEGENERATE_FLAG_THRESHOLD: f64 = 1e-10;

/// Riemann curvature `𝐑_y` as the endomorphism `Rⁱ_k` and its lowered form
/// `R_jk = g_ij Rⁱ_k`.
#[derive(Debug, Clone)]
pub struct RiemannOperator {
    pub r: DMatrix<f64>,
    pub r_lowered: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub at: TangentSample,
}

impl RiemannOperator {
    pub fn apply(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.r * u
    }

    /// Flag curvature `K(span{y, u}, y)`.
    pub fn flag_curvature(&self, u: &DVector<f64>) -> Result<f64> {
        let y = DVector::from_row_slice(&self.at.y);
        let gy = &self.g * &y;
        let gu = &self.g * u;
        let yy = y.dot(&gy);
        let uu = u.dot(&gu);
        let yu = y.dot(&gu);
        let gram = yy * uu - yu * yu;
        let normalized = gram / (yy * uu);
        if !(normalized > DEGENERATE_FLAG_THRESHOLD) {
            return Err(Error::DegenerateFlag { gram: normalized });
        }
        Ok(gu.dot(&self.apply(u)) / gram)
    }

    /// Frobenius norm of `Rⁱ_k`, the natural scale for residual checks.
    pub fn scale(&self) -> f64 {
        self.r.norm()
    }
}

/// Riemann operator from the spray:
/// `Rⁱ_k = 2∂Gⁱ/∂xᵏ − yʲ∂²Gⁱ/∂xʲ∂yᵏ + 2Gʲ∂²Gⁱ/∂yʲ∂yᵏ − ∂Gⁱ/∂yʲ ∂Gʲ/∂yᵏ`.
pub fn riemann(metric: &MetricField, at: &TangentSample) -> Result<RiemannOperator> {
    let jet = spray_jet(metric, at)?;
    Ok(riemann_from_jet(&jet, at))
}

pub fn riemann_from_jet(jet: &SprayJet, at: &TangentSample) -> RiemannOperator {
    let n = jet.spray.len();
    let mut r = &jet.dx * 2.0 - &jet.dxy_along_y - &jet.dy * &jet.dy;
    for i in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += jet.spray[j] * jet.dyy[i][(j, k)];
            }
            r[(i, k)] += 2.0 * acc;
        }
    }
    let r_lowered = &jet.g * &r;
    RiemannOperator {
        r,
        r_lowered,
        g: jet.g.clone(),
        at: at.clone(),
    }
}

/// `K(P, y)` for `P = span{y, u}`.
pub fn flag_curvature(metric: &MetricField, at: &TangentSample, u: &[f64]) -> Result<f64> {
    if u.len() != metric.dimension() {
        return Err(Error::Dimension {
            expected: metric.dimension(),
            got: u.len(),
        });
    }
    riemann(metric, at)?.flag_curvature(&DVector::from_row_slice(u))
}
