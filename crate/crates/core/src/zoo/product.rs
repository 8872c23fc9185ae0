use std::fmt::Debug;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::riemannian::RiemannianModel;
use crate::error::{Error, Result};
use crate::geometry::{Domain, MetricField, MetricFn};
use crate::jets::{self, Jet1, Scalar};

/// A positively 1-homogeneous profile `f(s, t)` combining the squared factor norms.
pub trait Profile: Debug + Send + Sync + 'static {
    fn eval<S: Scalar>(&self, s: S, t: S) -> S;
    fn name(&self) -> String;
}

/// `f = s + t`: the Riemannian product.
#[derive(Debug, Clone, Copy)]
pub struct LinearProfile;

impl Profile for LinearProfile {
    fn eval<S: Scalar>(&self, s: S, t: S) -> S {
        s + t
    }
    fn name(&self) -> String {
        "linear".into()
    }
}

/// `f = s + t + ε√(s² + t²)`.
#[derive(Debug, Clone, Copy)]
pub struct SzaboProfile {
    pub epsilon: f64,
}

impl Profile for SzaboProfile {
    fn eval<S: Scalar>(&self, s: S, t: S) -> S {
        let r = (s.square() + t.square()).sqrt();
        s + t + r * self.epsilon
    }
    fn name(&self) -> String {
        format!("szabo(eps={})", self.epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Linear,
    Szabo { epsilon: f64 },
}

/// A Riemannian factor `(dimension, model)` of a product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub dimension: usize,
    #[serde(default)]
    pub model: RiemannianModel,
}

/// `f` and its partial derivatives up to order two at `(s, t)`.
#[derive(Debug, Clone, Copy)]
pub struct ProfileDerivatives {
    pub f: f64,
    pub fs: f64,
    pub ft: f64,
    pub fss: f64,
    pub fst: f64,
    pub ftt: f64,
}

impl ProfileDerivatives {
    /// `h = f_s^{n₁−1} f_t^{n₂−1} (f_s f_t − 2 f f_st)`.
    pub fn h(&self, n1: usize, n2: usize) -> f64 {
        self.fs.powi(n1 as i32 - 1) * self.ft.powi(n2 as i32 - 1) * (self.fs * self.ft - 2.0 * self.f * self.fst)
    }
}

pub fn profile_derivatives<P: Profile>(profile: &P, s: f64, t: f64) -> ProfileDerivatives {
    let lay = jets::layout::layout(2, 2).expect("two directions, order two");
    let js = Jet1::variable(s, &[1.0, 0.0], lay);
    let jt = Jet1::variable(t, &[0.0, 1.0], lay);
    let f = profile.eval(js, jt);
    ProfileDerivatives {
        f: *f.value(),
        fs: f.d(&[0]),
        ft: f.d(&[1]),
        fss: f.d(&[0, 0]),
        fst: f.d(&[0, 1]),
        ftt: f.d(&[1, 1]),
    }
}

/// The five conditions for `g` to be positive definite, checked at `(s, t)`.
/// Returns the first violated condition.
pub fn positivity_violation<P: Profile>(profile: &P, s: f64, t: f64) -> Option<&'static str> {
    let d = profile_derivatives(profile, s, t);
    let checks: [(&'static str, f64); 5] = [
        ("f_s > 0", d.fs),
        ("f_t > 0", d.ft),
        ("f_s + 2 s f_ss > 0", d.fs + 2.0 * s * d.fss),
        ("f_t + 2 t f_tt > 0", d.ft + 2.0 * t * d.ftt),
        ("f_s f_t - 2 f f_st > 0", d.fs * d.ft - 2.0 * d.f * d.fst),
    ];
    checks.iter().find(|(_, v)| !(*v > 0.0)).map(|(c, _)| *c)
}

/// Points `(cos θ, sin θ)` on the open quarter circle; by homogeneity every
/// condition depends only on the ratio `s : t`.
pub fn quadrant_samples(count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|k| {
            let a = (k as f64 + 0.5) / count as f64 * std::f64::consts::FRAC_PI_2;
            (a.cos(), a.sin())
        })
        .collect()
}

/// Positivity gate: every condition at every sampled `(s, t)`, plus
/// homogeneity and nonvanishing of `f`.
pub fn check_profile<P: Profile>(profile: &P) -> Result<()> {
    for (s, t) in quadrant_samples(513) {
        if let Some(condition) = positivity_violation(profile, s, t) {
            return Err(Error::InvalidProfile { condition, s, t });
        }
        let f: f64 = profile.eval(s, t);
        if !(f > 0.0) {
            return Err(Error::InvalidProfile {
                condition: "f(s, t) != 0",
                s,
                t,
            });
        }
        let f2: f64 = profile.eval(2.5 * s, 2.5 * t);
        if (f2 - 2.5 * f).abs() > 1e-12 * f2.abs() {
            return Err(Error::InvalidProfile {
                condition: "f(ls, lt) = l f(s, t)",
                s,
                t,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Product<P> {
    n1: usize,
    m1: RiemannianModel,
    m2: RiemannianModel,
    profile: P,
}

impl<P: Profile> MetricFn for Product<P> {
    fn eval<S: Scalar>(&self, x: &[S], y: &[S]) -> S {
        let s = self.m1.quadratic(&x[..self.n1], &y[..self.n1]);
        let t = self.m2.quadratic(&x[self.n1..], &y[self.n1..]);
        self.profile.eval(s, t).sqrt()
    }
}

fn product_domain(f1: &FactorSpec, f2: &FactorSpec) -> Domain {
    let d1 = f1.model.domain(f1.dimension);
    let d2 = f2.model.domain(f2.dimension);
    let n1 = f1.dimension;
    let center = d1.center().iter().chain(d2.center()).copied().collect();
    let bbox = d1.bbox().iter().chain(d2.bbox()).copied().collect();
    let description = format!("{} x {}", d1.description(), d2.description());
    let (a, b) = (Arc::new(d1), Arc::new(d2));
    Domain::new(center, bbox, description, move |x| a.contains(&x[..n1]) && b.contains(&x[n1..]))
}

/// Product metric `F = √f(α₁², α₂²)` of two Riemannian factors, behind the
/// positivity gate.
pub fn szabo_product<P: Profile>(factor1: &FactorSpec, factor2: &FactorSpec, profile: P) -> Result<MetricField> {
    check_profile(&profile)?;
    szabo_product_unchecked(factor1, factor2, profile)
}

/// [`szabo_product`] without the positivity gate, for probing profiles that
/// violate it.
pub fn szabo_product_unchecked<P: Profile>(
    factor1: &FactorSpec,
    factor2: &FactorSpec,
    profile: P,
) -> Result<MetricField> {
    factor1.model.validate(factor1.dimension)?;
    factor2.model.validate(factor2.dimension)?;
    let n = factor1.dimension + factor2.dimension;
    let name = format!(
        "product({}^{} x {}^{}, {})",
        factor1.model.name(),
        factor1.dimension,
        factor2.model.name(),
        factor2.dimension,
        profile.name()
    );
    MetricField::new(
        name,
        n,
        product_domain(factor1, factor2),
        Product {
            n1: factor1.dimension,
            m1: factor1.model.clone(),
            m2: factor2.model.clone(),
            profile,
        },
    )
}

pub fn szabo_product_from_spec(f1: &FactorSpec, f2: &FactorSpec, profile: &ProfileSpec) -> Result<MetricField> {
    match profile {
        ProfileSpec::Linear => szabo_product(f1, f2, LinearProfile),
        ProfileSpec::Szabo { epsilon } => szabo_product(f1, f2, SzaboProfile { epsilon: *epsilon }),
    }
}

/// The hyperbolic-plane factor of the Szabó family.
pub fn szabo_factors() -> (FactorSpec, FactorSpec) {
    (
        FactorSpec {
            dimension: 2,
            model: RiemannianModel::HyperbolicDisk,
        },
        FactorSpec {
            dimension: 1,
            model: RiemannianModel::Flat,
        },
    )
}

/// `F_ε = √(h² + w² + ε√(h⁴ + w⁴))` on the Poincaré disk times a line.
pub fn szabo_epsilon(epsilon: f64) -> Result<MetricField> {
    let (a, b) = szabo_factors();
    szabo_product(&a, &b, SzaboProfile { epsilon })
}

/// Smallest `ε` (to `tol`) for which the Szabó profile passes the positivity
/// gate; every larger `ε` passes as well.
pub fn szabo_epsilon_lower_bound(tol: f64) -> f64 {
    let ok = |e: f64| check_profile(&SzaboProfile { epsilon: e }).is_ok();
    let (mut lo, mut hi) = (-1.0, 0.0);
    debug_assert!(!ok(lo) && ok(hi));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn szabo_profile_derivatives() {
        // r = √(s²+t²): f_s = 1 + εs/r, f_ss = εt²/r³, f_st = −εst/r³
        let (s, t, e) = (0.6, 1.3, 0.5);
        let r = f64::hypot(s, t);
        let d = profile_derivatives(&SzaboProfile { epsilon: e }, s, t);
        assert_relative_eq!(d.fs, 1.0 + e * s / r, epsilon = 1e-14);
        assert_relative_eq!(d.ft, 1.0 + e * t / r, epsilon = 1e-14);
        assert_relative_eq!(d.fss, e * t * t / r.powi(3), epsilon = 1e-14);
        assert_relative_eq!(d.fst, -e * s * t / r.powi(3), epsilon = 1e-14);
        assert_relative_eq!(d.ftt, e * s * s / r.powi(3), epsilon = 1e-14);
    }

    #[test]
    fn gate_accepts_and_rejects() {
        assert!(szabo_epsilon(0.5).is_ok());
        assert!(szabo_epsilon(3.0).is_ok());
        match szabo_epsilon(-0.8) {
            Err(Error::InvalidProfile { .. }) => {}
            other => panic!("expected a profile error, got {other:?}"),
        }
    }

    #[test]
    fn lower_bound_of_epsilon() {
        // the binding constraint sits on the diagonal s = t: 1 + 2√2 ε + 3ε²/2 > 0
        let e = szabo_epsilon_lower_bound(1e-10);
        assert_relative_eq!(e, -f64::sqrt(2.0) / 3.0, epsilon = 1e-6);
    }
}
