use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, MetricField, TangentSample};

/// Default shrink of the chart used when sampling base points.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Deterministic sampling plan: base points uniform in the shrunk chart,
/// directions uniform on the Euclidean sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePlan {
    pub count: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

impl SamplePlan {
    pub fn new(count: usize, seed: u64) -> Self {
        SamplePlan {
            count,
            margin: DEFAULT_MARGIN,
            seed,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// `count` tangent samples `(x, y)`.
    pub fn tangent_samples(&self, metric: &MetricField) -> Result<Vec<TangentSample>> {
        let mut rng = self.rng();
        (0..self.count)
            .map(|_| tangent_sample(&mut rng, metric, self.margin))
            .collect()
    }

    /// `count` flags `(x, y, u)` with `u` uniform and independent of `y`.
    pub fn flags(&self, metric: &MetricField) -> Result<Vec<(TangentSample, Vec<f64>)>> {
        let mut rng = self.rng();
        let n = metric.dimension();
        (0..self.count)
            .map(|_| {
                let at = tangent_sample(&mut rng, metric, self.margin)?;
                let u = uniform_sphere(&mut rng, n);
                Ok((at, u))
            })
            .collect()
    }
}

/// Uniform point on `S^{n−1}` (normalized Gaussian).
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 1e-12 {
            return v.into_iter().map(|a| a / len).collect();
        }
    }
}

/// Uniform point of the domain shrunk by `margin`, by rejection from its box.
pub fn domain_point<R: Rng + ?Sized>(rng: &mut R, domain: &Domain, margin: f64) -> Result<Vec<f64>> {
    for _ in 0..100_000 {
        let x: Vec<f64> = domain
            .bbox()
            .iter()
            .map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
            .collect();
        if domain.contains_with_margin(&x, margin) {
            return Ok(x);
        }
    }
    Err(Error::Sampling(format!(
        "could not draw a point inside {}",
        domain.description()
    )))
}

pub fn tangent_sample<R: Rng + ?Sized>(rng: &mut R, metric: &MetricField, margin: f64) -> Result<TangentSample> {
    let x = domain_point(rng, metric.domain(), margin)?;
    let y = uniform_sphere(rng, metric.dimension());
    metric.sample(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn plans_are_deterministic() {
        let m = zoo::funk_ball_shifted(&[0.3, 0.0]).unwrap();
        let a = SamplePlan::new(20, 7).tangent_samples(&m).unwrap();
        let b = SamplePlan::new(20, 7).tangent_samples(&m).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(s.x.iter().map(|v| v * v).sum::<f64>() < 0.95 * 0.95);
        }
        let c = SamplePlan::new(20, 8).tangent_samples(&m).unwrap();
        assert_ne!(a, c);
    }
}
