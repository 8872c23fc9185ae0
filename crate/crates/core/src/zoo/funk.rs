use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Domain, MetricField, MetricFn};
use crate::jets::{self, dot, dot_f64, Jet1, Scalar};

/// Closed-form shifted Funk metric on the unit ball,
/// `F = [√(|y|² − |x|²|y|² + ⟨x,y⟩²) + ⟨x,y⟩]/(1 − |x|²) + ⟨a,y⟩/(1 + ⟨a,x⟩)`.
#[derive(Debug, Clone)]
struct ShiftedFunk {
    a: Vec<f64>,
}

impl MetricFn for ShiftedFunk {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let xx = dot(x, x);
        let yy = dot(y, y);
        let xy = dot(x, y);
        let q = -xx.clone() + 1.0;
        let disc = yy.clone() - xx * yy + xy.square();
        let theta = (disc.sqrt() + xy) / q;
        if self.a.iter().all(|v| *v == 0.0) {
            return theta;
        }
        theta + dot_f64(&self.a, y) / (dot_f64(&self.a, x) + 1.0)
    }
}

/// Radius of the ball about the origin on which the shifted Funk metric is
/// guaranteed positive: `min(1, (1 − |a|)/(2|a|))`.
pub fn shifted_funk_radius(a: &[f64]) -> f64 {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 {
        1.0
    } else {
        ((1.0 - na) / (2.0 * na)).min(1.0)
    }
}

/// The shifted Funk family (Funk metric of the unit ball plus an exact
/// 1-form); `a = 0` gives the Funk metric itself.
pub fn funk_ball_shifted(a: &[f64]) -> Result<MetricField> {
    let n = a.len();
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(na < 1.0) {
        return Err(Error::InvalidParameter(format!("shift vector must satisfy |a| < 1, got {na}")));
    }
    let r = shifted_funk_radius(a);
    MetricField::new(
        format!("funk_ball_shifted(|a|={na:.3})"),
        n,
        Domain::ball(n, r),
        ShiftedFunk { a: a.to_vec() },
    )
}

/// A Minkowski norm `φ(y)` usable as the boundary of an implicit Funk metric.
pub trait MinkowskiNorm: Debug + Send + Sync + 'static {
    fn eval<S: Scalar>(&self, y: &[S]) -> S;
    /// Radius of a Euclidean ball containing the unit `φ`-ball.
    fn outer_radius(&self) -> f64;
    fn name(&self) -> String;
}

/// The Euclidean norm.
#[derive(Debug, Clone, Copy)]
pub struct EuclideanNorm;

impl MinkowskiNorm for EuclideanNorm {
    fn eval<S: Scalar>(&self, y: &[S]) -> S {
        dot(y, y).sqrt()
    }
    fn outer_radius(&self) -> f64 {
        1.0
    }
    fn name(&self) -> String {
        "euclidean".into()
    }
}

/// Randers norm `|y| + ⟨b, y⟩`, `|b| < 1`.
#[derive(Debug, Clone)]
pub struct RandersNorm {
    b: Vec<f64>,
}

impl RandersNorm {
    pub fn new(b: &[f64]) -> Result<Self> {
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(nb < 1.0) {
            return Err(Error::InvalidParameter(format!("Randers norm needs |b| < 1, got {nb}")));
        }
        Ok(RandersNorm { b: b.to_vec() })
    }
}

impl MinkowskiNorm for RandersNorm {
    fn eval<S: Scalar>(&self, y: &[S]) -> S {
        dot(y, y).sqrt() + dot_f64(&self.b, y)
    }
    fn outer_radius(&self) -> f64 {
        1.0 / (1.0 - self.b.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
    fn name(&self) -> String {
        format!("randers(b={:?})", self.b)
    }
}

/// Configurable choice of `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    Euclidean,
    Randers { b: Vec<f64> },
}

/// `θ − φ(y + θx)` and its `θ`-derivative at a real point.
fn residual<N: MinkowskiNorm>(phi: &N, x: &[f64], y: &[f64], theta: f64) -> (f64, f64) {
    let lay = jets::layout::layout(1, 1).expect("one direction, order one");
    let t = Jet1::variable(theta, &[1.0], lay);
    let z: Vec<Jet1> = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| t.clone() * xi + yi)
        .collect();
    let p = phi.eval(&z);
    (theta - p.value(), 1.0 - p.d(&[0]))
}

/// Real solution of `Θ = φ(y + Θx)` by safeguarded Newton iteration on the
/// bracket `[0, φ(y)/(1 − φ(x))]`.
pub fn solve_theta<N: MinkowskiNorm>(phi: &N, x: &[f64], y: &[f64]) -> Result<f64> {
    let fail = || Error::ImplicitSolve {
        x: x.to_vec(),
        y: y.to_vec(),
    };
    let py: f64 = phi.eval(y);
    let px: f64 = phi.eval(x);
    if !(px < 1.0) || !py.is_finite() || py <= 0.0 {
        return Err(fail());
    }
    let (mut lo, mut hi) = (0.0, py / (1.0 - px));
    let mut theta = py;
    for _ in 0..200 {
        let (r, dr) = residual(phi, x, y, theta);
        if !r.is_finite() {
            return Err(fail());
        }
        if r.abs() <= 4.0 * f64::EPSILON * theta.abs().max(py) {
            return Ok(theta);
        }
        if r < 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        let newton = theta - r / dr;
        let next = if dr > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - theta).abs() <= f64::EPSILON * theta.abs() {
            return Ok(next);
        }
        theta = next;
    }
    let (r, _) = residual(phi, x, y, theta);
    if r.abs() <= 1e-12 * py {
        Ok(theta)
    } else {
        Err(fail())
    }
}

/// `Θ` over any scalar type: real root first, then a constant-slope Newton
/// iteration that fixes one more Taylor order per pass.
fn theta<S: Scalar, N: MinkowskiNorm>(phi: &N, x: &[S], y: &[S]) -> S {
    let xr: Vec<f64> = x.iter().map(Scalar::re).collect();
    let yr: Vec<f64> = y.iter().map(Scalar::re).collect();
    let t0 = match solve_theta(phi, &xr, &yr) {
        Ok(t) => t,
        Err(_) => return S::from_f64(f64::NAN),
    };
    let order = x.iter().chain(y).map(Scalar::total_order).max().unwrap_or(0);
    if order == 0 {
        return S::from_f64(t0);
    }
    let (_, slope) = residual(phi, &xr, &yr, t0);
    let inv = 1.0 / slope;
    let mut t = S::from_f64(t0);
    for _ in 0..=order {
        let z: Vec<S> = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| xi.clone() * t.clone() + yi.clone())
            .collect();
        let r = t.clone() - phi.eval(&z);
        t -= r * inv;
    }
    t
}

#[derive(Debug, Clone)]
struct ImplicitFunk<N> {
    phi: N,
}

impl<N: MinkowskiNorm> MetricFn for ImplicitFunk<N> {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        theta(&self.phi, x, y)
    }
}

/// Funk metric of the convex domain `{φ < 1}`, defined implicitly by
/// `Θ = φ(y + Θx)` and solved numerically, with derivatives propagated through
/// the implicit equation.
pub fn funk_implicit<N: MinkowskiNorm + Clone>(n: usize, phi: N) -> Result<MetricField> {
    let r = phi.outer_radius();
    let inside_phi = phi.clone();
    let domain = Domain::new(
        vec![0.0; n],
        vec![(-r, r); n],
        format!("unit ball of {}", phi.name()),
        move |x| inside_phi.eval(x) < 1.0,
    );
    MetricField::new(format!("funk_implicit({})", phi.name()), n, domain, ImplicitFunk { phi })
}

/// Build the implicit Funk metric from a [`NormSpec`].
pub fn funk_implicit_from_spec(n: usize, spec: &NormSpec) -> Result<MetricField> {
    match spec {
        NormSpec::Euclidean => funk_implicit(n, EuclideanNorm),
        NormSpec::Randers { b } => {
            if b.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: b.len(),
                });
            }
            funk_implicit(n, RandersNorm::new(b)?)
        }
    }
}

/// `max_k |F_{xᵏ} − F F_{yᵏ}| / max(1, max_k |F_{xᵏ}|)`, the scaled residual of
/// the Funk equation at one sample.
pub fn funk_pde_residual(metric: &MetricField, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = metric.dimension();
    let sample = metric.sample(x, y)?;
    let point: Vec<f64> = sample.x.iter().chain(&sample.y).copied().collect();
    let dirs: Vec<Vec<f64>> = (0..2 * n)
        .map(|k| {
            let mut e = vec![0.0; 2 * n];
            e[k] = 1.0;
            e
        })
        .collect();
    let mut v: Vec<Jet1> = jets::seed(&point, &dirs, 1)?;
    let ys = v.split_off(n);
    let f = metric.eval(&v, &ys);
    if !f.is_finite() {
        return Err(Error::NonFinite {
            x: x.to_vec(),
            y: y.to_vec(),
        });
    }
    let theta = *f.value();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for k in 0..n {
        let fx = f.d(&[k]);
        worst = worst.max((fx - theta * f.d(&[n + k])).abs());
        scale = scale.max(fx.abs());
    }
    Ok(worst / scale)
}
