use super::riemannian::RiemannianModel;
use crate::error::{Error, Result};
use crate::geometry::{MetricField, MetricFn};
use crate::jets::Scalar;

#[derive(Debug, Clone)]
struct Randers {
    model: RiemannianModel,
    b: Vec<f64>,
    gradient: Option<Vec<Vec<f64>>>,
}

impl Randers {
    fn covector_f64(&self, x: &[f64]) -> Vec<f64> {
        let mut b = self.b.clone();
        if let Some(g) = &self.gradient {
            for (bi, row) in b.iter_mut().zip(g) {
                *bi += row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
            }
        }
        b
    }
}

impl MetricFn for Randers {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let alpha = self.model.quadratic(x, y).sqrt();
        let mut beta = S::zero();
        for (i, yi) in y.iter().enumerate() {
            let mut bi = S::from_f64(self.b[i]);
            if let Some(g) = &self.gradient {
                for (j, xj) in x.iter().enumerate() {
                    bi += xj.clone() * g[i][j];
                }
            }
            beta.fma_assign(&bi, yi);
        }
        alpha + beta
    }
}

/// Randers metric `F = α + β` with `α` from a [`RiemannianModel`] and the
/// affine covector field `b(x) = b + B x`.
///
/// `‖β‖_x = √(a^{ij} b_i b_j) < 1` is checked on a deterministic sample of the
/// domain.
pub fn randers(
    n: usize,
    model: &RiemannianModel,
    b: &[f64],
    gradient: Option<&[Vec<f64>]>,
) -> Result<MetricField> {
    model.validate(n)?;
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len(),
        });
    }
    if let Some(g) = gradient {
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter(format!("b_gradient must be {n}x{n}")));
        }
    }
    let r = Randers {
        model: model.clone(),
        b: b.to_vec(),
        gradient: gradient.map(|g| g.to_vec()),
    };
    let mut domain = model.domain(n);
    if gradient.is_some() {
        // an affine field eventually leaves the unit co-ball, so the chart is cut to the sampled box
        let base = domain.clone();
        domain = crate::geometry::Domain::new(
            base.center().to_vec(),
            base.bbox().to_vec(),
            format!("{} within [-1, 1]^n", base.description()),
            move |x| base.contains(x) && x.iter().all(|v| v.abs() < 1.0),
        );
    }
    let mut points = super::domain_points(&domain, 512, 0.0, 0x7a4d);
    points.push(domain.center().to_vec());
    if gradient.is_some() && n <= 12 {
        for mask in 0..(1usize << n) {
            let corner: Vec<f64> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { 0.999 } else { -0.999 })
                .collect();
            if domain.contains(&corner) {
                points.push(corner);
            }
        }
    }
    for x in &points {
        let norm = model.dual_norm(x, &r.covector_f64(x));
        if !(norm < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Randers covector has norm {norm} >= 1 at x = {x:?}"
            )));
        }
    }
    let norm0 = model.dual_norm(domain.center(), b);
    MetricField::new(format!("randers(|b|={norm0:.3})"), n, domain, r)
}

/// `‖β‖_x` of a Randers metric with constant covector `b` and the given `α`.
pub fn beta_norm(model: &RiemannianModel, x: &[f64], b: &[f64]) -> f64 {
    model.dual_norm(x, b)
}
