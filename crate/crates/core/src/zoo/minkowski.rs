use crate::error::{Error, Result};
use crate::geometry::{Domain, MetricField, MetricFn};
use crate::jets::{dot, dot_f64, Scalar};

#[derive(Debug, Clone)]
struct Minkowski {
    quartic: f64,
    b: Vec<f64>,
}

impl MetricFn for Minkowski {
    fn eval<S: Scalar>(&self, _x: &[S], y: &[S]) -> S {
        let r2 = dot(y, y);
        let mut q = r2.square();
        if self.quartic != 0.0 {
            let mut s4 = S::zero();
            for v in y {
                s4 += v.square().square();
            }
            q += s4 * self.quartic;
        }
        q.powf(0.25) + dot_f64(&self.b, y)
    }
}

/// Locally Minkowski metric `F = (|y|⁴ + λ Σ yᵢ⁴)^{1/4} + ⟨b, y⟩`, independent of `x`.
pub fn minkowski(n: usize, quartic: f64, b: &[f64]) -> Result<MetricField> {
    if !(quartic >= 0.0 && quartic.is_finite()) {
        return Err(Error::InvalidParameter(format!("quartic weight must be >= 0, got {quartic}")));
    }
    let b = if b.is_empty() { vec![0.0; n] } else { b.to_vec() };
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: b.len(),
        });
    }
    let m = MetricField::new(
        format!("minkowski(quartic={quartic})"),
        n,
        Domain::everywhere(n),
        Minkowski { quartic, b },
    )?;
    super::validate_sampled(&m, 64, 64)?;
    Ok(m)
}
