use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jets::{Jet, Jet1, Jet2, Scalar};

/// A Finsler function `F(x, y)` written once, generically over the scalar type,
/// so it can be evaluated on reals and on jets.
///
/// Implementations must be positively 1-homogeneous in `y`.
pub trait MetricFn: Send + Sync + 'static {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S;
}

/// Object-safe view of a [`MetricFn`] at the scalar types the geometry layer needs.
pub trait DynMetric: Send + Sync {
    fn eval_f64(&self, x: &[f64], y: &[f64]) -> f64;
    fn eval_jet1(&self, x: &[Jet1], y: &[Jet1]) -> Jet1;
    fn eval_jet2(&self, x: &[Jet2], y: &[Jet2]) -> Jet2;
}

impl<M: MetricFn> DynMetric for M {
    fn eval_f64(&self, x: &[f64], y: &[f64]) -> f64 {
        self.eval(x, y)
    }
    fn eval_jet1(&self, x: &[Jet1], y: &[Jet1]) -> Jet1 {
        self.eval(x, y)
    }
    fn eval_jet2(&self, x: &[Jet2], y: &[Jet2]) -> Jet2 {
        self.eval(x, y)
    }
}

mod sealed {
    pub trait Sealed {}
    impl Sealed for f64 {}
    impl Sealed for super::Jet1 {}
    impl Sealed for super::Jet2 {}
}

/// Scalar types a [`MetricField`] can be evaluated on.
pub trait MetricScalar: Scalar + sealed::Sealed {
    fn eval_metric(m: &dyn DynMetric, x: &[Self], y: &[Self]) -> Self;
}

impl MetricScalar for f64 {
    fn eval_metric(m: &dyn DynMetric, x: &[f64], y: &[f64]) -> f64 {
        m.eval_f64(x, y)
    }
}

impl MetricScalar for Jet<f64> {
    fn eval_metric(m: &dyn DynMetric, x: &[Jet1], y: &[Jet1]) -> Jet1 {
        m.eval_jet1(x, y)
    }
}

impl MetricScalar for Jet<Jet<f64>> {
    fn eval_metric(m: &dyn DynMetric, x: &[Jet2], y: &[Jet2]) -> Jet2 {
        m.eval_jet2(x, y)
    }
}

type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Coordinate chart domain: a membership predicate, a center the domain is
/// star-shaped about, and a bounding box used for sampling.
#[derive(Clone)]
pub struct Domain {
    center: Vec<f64>,
    bbox: Vec<(f64, f64)>,
    inside: Membership,
    description: String,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("description", &self.description)
            .field("bbox", &self.bbox)
            .finish()
    }
}

impl Domain {
    pub fn new(
        center: Vec<f64>,
        bbox: Vec<(f64, f64)>,
        description: impl Into<String>,
        inside: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Domain {
            center,
            bbox,
            inside: Arc::new(inside),
            description: description.into(),
        }
    }

    /// All of `Rⁿ`; the box `[-1, 1]ⁿ` is used for sampling.
    pub fn everywhere(n: usize) -> Self {
        Domain::new(vec![0.0; n], vec![(-1.0, 1.0); n], "R^n", |_| true)
    }

    /// Open Euclidean ball about the origin.
    pub fn ball(n: usize, radius: f64) -> Self {
        Domain::new(
            vec![0.0; n],
            vec![(-radius, radius); n],
            format!("open ball of radius {radius}"),
            move |x| x.iter().map(|v| v * v).sum::<f64>() < radius * radius,
        )
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.center.len() && x.iter().all(|v| v.is_finite()) && (self.inside)(x)
    }

    /// Membership in the domain shrunk about its center by the factor `1 - margin`.
    pub fn contains_with_margin(&self, x: &[f64], margin: f64) -> bool {
        let s = 1.0 / (1.0 - margin);
        let scaled: Vec<f64> = x
            .iter()
            .zip(&self.center)
            .map(|(v, c)| c + (v - c) * s)
            .collect();
        self.contains(x) && self.contains(&scaled)
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn bbox(&self) -> &[(f64, f64)] {
        &self.bbox
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

/// A Finsler metric on a coordinate chart.
#[derive(Clone)]
pub struct MetricField {
    name: String,
    dimension: usize,
    domain: Domain,
    f: Arc<dyn DynMetric>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("domain", &self.domain)
            .finish()
    }
}

impl MetricField {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        domain: Domain,
        f: impl MetricFn,
    ) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidParameter(format!(
                "metric dimension must be at least 2, got {dimension}"
            )));
        }
        if domain.center().len() != dimension {
            return Err(Error::Dimension {
                expected: dimension,
                got: domain.center().len(),
            });
        }
        Ok(MetricField {
            name: name.into(),
            dimension,
            domain,
            f: Arc::new(f),
        })
    }

    /// Like [`MetricField::new`] but allows one-dimensional factors, which only
    /// appear as building blocks of product metrics.
    pub fn factor(
        name: impl Into<String>,
        dimension: usize,
        domain: Domain,
        f: impl MetricFn,
    ) -> Self {
        MetricField {
            name: name.into(),
            dimension,
            domain,
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn eval<S: MetricScalar>(&self, x: &[S], y: &[S]) -> S {
        S::eval_metric(self.f.as_ref(), x, y)
    }

    /// `F(x, y)` on reals.
    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        self.f.eval_f64(x, y)
    }

    pub fn sample(&self, x: &[f64], y: &[f64]) -> Result<TangentSample> {
        TangentSample::new(self, x.to_vec(), y.to_vec())
    }
}

/// A base point and a nonzero tangent direction inside a chart.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TangentSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TangentSample {
    pub fn new(metric: &MetricField, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = metric.dimension();
        for v in [&x, &y] {
            if v.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        if !metric.domain().contains(&x) {
            return Err(Error::OutOfDomain(x));
        }
        if y.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidParameter("tangent direction y must be nonzero".into()));
        }
        let f = metric.value(&x, &y);
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::NonFinite { x, y });
        }
        Ok(TangentSample { x, y })
    }
}
