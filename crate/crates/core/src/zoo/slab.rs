use crate::error::{Error, Result};
use crate::geometry::{Domain, MetricField, MetricFn};
use crate::jets::{dot, Scalar};

#[derive(Debug, Clone, Copy)]
struct Slab;

impl MetricFn for Slab {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let (s, t) = (&x[0], &x[1]);
        let (u, v) = (&y[0], &y[1]);
        let q = s.clone() * v.clone() - t.clone() * u.clone();
        let w = -(s.square() + t.square()) + 1.0;
        let disc = q.square() + dot(y, y) * w.clone();
        (disc.sqrt() - q) / w
    }
}

/// Incomplete metric on the solid cylinder `{s² + t² < 1} × R^{n−2}`:
/// `F = [√(q² + |y|²(1 − s² − t²)) − q] / (1 − s² − t²)` with `q = −t u + s v`.
pub fn incomplete_slab(n: usize) -> Result<MetricField> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("slab metric needs n >= 2, got {n}")));
    }
    let domain = Domain::new(
        vec![0.0; n],
        vec![(-1.0, 1.0); n],
        "solid cylinder s^2 + t^2 < 1",
        |x| x[0] * x[0] + x[1] * x[1] < 1.0,
    );
    MetricField::new(format!("incomplete_slab(n={n})"), n, domain, Slab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_on_the_axis() {
        let m = incomplete_slab(3).unwrap();
        assert_relative_eq!(m.value(&[0.0, 0.0, 0.7], &[1.0, 2.0, 2.0]), 3.0, epsilon = 1e-15);
        assert!(m.sample(&[0.8, 0.7, 0.0], &[1.0, 0.0, 0.0]).is_err());
    }
}
