use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::claim::{Claim, GeodesicPlan, Normalize, Quantity, Target, Tolerance, ToleranceKind};
use super::product::ProductParts;
use super::report::{ClaimReport, Stats, SuiteReport, WorstSample};
use super::sampling::SamplePlan;
use crate::error::{Error, Result};
use crate::flow::{integrate_geodesic, jacobi_propagate, torsion_trace};
use crate::geometry::{
    berwald_defect, cartan_norm, flag_curvature, log_density_gradient, mean_cartan, mean_landsberg, riemann, spray,
    torsion::sphere_directions, torsion_bundle, MetricField, TangentSample,
};
use crate::zoo::{beta_norm, funk_pde_residual, MetricSpec};

/// Nodes with `φ` at or below this are skipped by `phi_convexity`.
pub const PHI_FLOOR: f64 = 1e-8;

/// Base-point step for the closedness differences of `closed_one_form`.
pub const CLOSEDNESS_STEP: f64 = 1e-3;

/// One evaluated sample.
#[derive(Debug, Clone)]
struct Observation {
    sample: TangentSample,
    u: Option<Vec<f64>>,
    value: f64,
    /// Natural size of the quantity at this sample; relative tolerances are
    /// fractions of it.
    scale: f64,
    details: BTreeMap<String, f64>,
}

struct Value {
    value: f64,
    scale: f64,
    details: Vec<(&'static str, f64)>,
}

impl Value {
    fn plain(value: f64) -> Self {
        Value {
            value,
            scale: 1.0,
            details: Vec::new(),
        }
    }

    fn scaled(value: f64, scale: f64) -> Self {
        Value {
            value,
            scale,
            details: Vec::new(),
        }
    }

    fn with(mut self, key: &'static str, v: f64) -> Self {
        self.details.push((key, v));
        self
    }
}

fn g_norm(g: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(g * v)).max(0.0).sqrt()
}

/// Everything a claim needs besides the sample itself.
struct Context<'a> {
    metric: &'a MetricField,
    spec: Option<&'a MetricSpec>,
    product: Option<ProductParts>,
    normalize: Normalize,
    geodesic: GeodesicPlan,
}

impl Context<'_> {
    fn product(&self) -> Result<&ProductParts> {
        self.product
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("quantity needs a product metric".into()))
    }

    fn evaluate(&self, q: Quantity, at: &TangentSample, u: &[f64]) -> Result<Value> {
        let metric = self.metric;
        let n = metric.dimension();
        let f = metric.value(&at.x, &at.y);
        Ok(match q {
            Quantity::FlagCurvature => Value::plain(flag_curvature(metric, at, u)?),
            Quantity::SCurvature => {
                let s = crate::geometry::s_curvature(metric, at)?;
                let v = match self.normalize {
                    Normalize::None => s,
                    Normalize::F => s / f,
                    Normalize::NPlusOneF => s / ((n + 1) as f64 * f),
                };
                Value::plain(v).with("s", s).with("F", f)
            }
            Quantity::MeanCartan => Value::plain(mean_cartan(metric, at)?.norm()),
            Quantity::MeanLandsberg => Value::plain(mean_landsberg(metric, at)?.norm()),
            Quantity::CartanOrthogonality => {
                let b = torsion_bundle(metric, at)?;
                let y_len = DVector::from_row_slice(&at.y).norm();
                let iy = b.cartan.contract_y().abs();
                let jy = b.landsberg.contract_y().abs();
                let scale = b.cartan.covariant.norm().max(b.landsberg.covariant.norm()) * y_len;
                Value::scaled(iy.max(jy), scale).with("i_dot_y", iy).with("j_dot_y", jy)
            }
            Quantity::RiemannCartan | Quantity::RiemannCartanForm => {
                let b = torsion_bundle(metric, at)?;
                let r = riemann(metric, at)?;
                let i = &b.cartan.contravariant;
                let ri = &r.r * i;
                let i_norm = b.cartan.norm();
                if q == Quantity::RiemannCartan {
                    Value::scaled(g_norm(&b.g, &ri), r.scale() * i_norm)
                } else {
                    Value::scaled(ri.dot(&(&b.g * i)), r.scale() * i_norm * i_norm)
                }
            }
            Quantity::JacobiResidual | Quantity::PhiConvexity | Quantity::PhiVariation => self.along_geodesic(q, at)?,
            Quantity::DetIdentity => Value::plain(self.product()?.errors(at)?.determinant),
            Quantity::SpraySplit => Value::plain(self.product()?.errors(at)?.spray_split),
            Quantity::ProductBlocks => {
                let e = self.product()?.errors(at)?;
                Value::plain(e.blocks.max(e.cartan).max(e.curvature))
                    .with("blocks", e.blocks)
                    .with("cartan", e.cartan)
                    .with("curvature", e.curvature)
            }
            Quantity::FunkPde => Value::plain(funk_pde_residual(metric, &at.x, &at.y)?),
            Quantity::BerwaldQuadratic => Value::plain(berwald_defect(metric, at)?),
            Quantity::CartanBound => {
                let Some(MetricSpec::Randers {
                    model, b, b_gradient, ..
                }) = self.spec
                else {
                    return Err(Error::InvalidParameter("cartan_bound needs a randers metric".into()));
                };
                let mut bx = b.clone();
                if let Some(grad) = b_gradient {
                    for (bi, row) in bx.iter_mut().zip(grad) {
                        *bi += row.iter().zip(&at.x).map(|(a, v)| a * v).sum::<f64>();
                    }
                }
                let beta = beta_norm(model, &at.x, &bx);
                let bound = (n + 1) as f64 / 2f64.sqrt() * (1.0 - (1.0 - beta * beta).max(0.0).sqrt()).sqrt();
                let norm = cartan_norm(metric, &at.x)?.value;
                Value::scaled(norm - bound, bound)
                    .with("beta", beta)
                    .with("cartan_norm", norm)
                    .with("bound", bound)
            }
            Quantity::ClosedOneForm => {
                return Err(Error::InvalidParameter("closed_one_form is evaluated per base point".into()))
            }
        })
    }

    fn along_geodesic(&self, q: Quantity, at: &TangentSample) -> Result<Value> {
        let metric = self.metric;
        let f = metric.value(&at.x, &at.y);
        let y: Vec<f64> = at.y.iter().map(|v| v / f).collect();
        let tr = integrate_geodesic(metric, &at.x, &y, (0.0, self.geodesic.span), self.geodesic.tol)?;
        let end = tr.end();
        let tt = torsion_trace(metric, &tr)?;
        let max_phi = tt.max_phi();
        Ok(match q {
            Quantity::JacobiResidual => {
                let v = jacobi_propagate(metric, &tr, &tt.i_of_t[0], &tt.j_of_t[0])?;
                let mismatch = v
                    .iter()
                    .zip(&tt.i_of_t)
                    .zip(&tt.g_of_t)
                    .map(|((v, i), g)| {
                        let d = DVector::from_iterator(v.len(), v.iter().zip(i).map(|(a, b)| a - b));
                        g_norm(g, &d)
                    })
                    .fold(0.0, f64::max);
                let residual = tt.max_interior_residual();
                Value::scaled(residual.max(mismatch), max_phi)
                    .with("residual", residual)
                    .with("jacobi_mismatch", mismatch)
                    .with("di_discrepancy", tt.di_discrepancy)
                    .with("max_phi", max_phi)
                    .with("t_end", end)
            }
            Quantity::PhiConvexity => {
                let d2 = tt.phi_second_derivative();
                let active: Vec<f64> = d2
                    .iter()
                    .zip(&tt.phi_of_t)
                    .filter(|(_, phi)| **phi > PHI_FLOOR)
                    .map(|(v, _)| *v)
                    .collect();
                let min = active.iter().copied().fold(f64::INFINITY, f64::min);
                let value = if active.is_empty() { 0.0 } else { min };
                Value::plain(value)
                    .with("active_nodes", active.len() as f64)
                    .with("max_phi", max_phi)
                    .with("t_end", end)
            }
            _ => Value::plain(tt.phi_variation()).with("max_phi", max_phi).with("t_end", end),
        })
    }
}

/// `γ_x(y) = S(x, y) − (n+1)cF(x, y)` fitted by a linear form `w·y` over a
/// fixed set of directions. Returns `w`, the largest fit residual and the
/// scale `max(max |γ|, max F)`.
fn gamma_fit(metric: &MetricField, x: &[f64], c: f64, dirs: &[Vec<f64>]) -> Result<(DVector<f64>, f64, f64)> {
    let n = metric.dimension();
    let grad = log_density_gradient(metric, x)?;
    let mut a = DMatrix::zeros(dirs.len(), n);
    let mut gamma = DVector::zeros(dirs.len());
    let mut scale: f64 = 0.0;
    for (j, d) in dirs.iter().enumerate() {
        let at = metric.sample(x, d)?;
        let f = metric.value(x, d);
        let s = spray(metric, &at)?.trace() - grad.iter().zip(d).map(|(g, v)| g * v).sum::<f64>();
        gamma[j] = s - (n + 1) as f64 * c * f;
        scale = scale.max(gamma[j].abs()).max(f);
        for i in 0..n {
            a[(j, i)] = d[i];
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-8 * smax) {
        return Err(Error::Sampling("rank-deficient direction set for the linear fit".into()));
    }
    let w = svd
        .solve(&gamma, 1e-12 * smax)
        .map_err(|e| Error::Sampling(e.to_string()))?;
    let residual = (&a * &w - &gamma).amax();
    Ok((w, residual, scale))
}

fn closed_form_at(metric: &MetricField, x: &[f64], c: f64) -> Result<Value> {
    let n = metric.dimension();
    let dirs = sphere_directions(n, (4 * n).max(8), 0x51ce);
    let (w, residual, scale) = gamma_fit(metric, x, c, &dirs)?;
    let linearity = residual / scale;
    let h = CLOSEDNESS_STEP;
    let mut jac = DMatrix::zeros(n, n);
    for m in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[m] += h;
        xm[m] -= h;
        if !(metric.domain().contains(&xp) && metric.domain().contains(&xm)) {
            return Err(Error::OutOfDomain(x.to_vec()));
        }
        let wp = gamma_fit(metric, &xp, c, &dirs)?.0;
        let wm = gamma_fit(metric, &xm, c, &dirs)?.0;
        for k in 0..n {
            jac[(m, k)] = (wp[k] - wm[k]) / (2.0 * h);
        }
    }
    let closedness = (&jac - jac.transpose()).amax();
    let mut v = Value::plain(linearity.max(closedness))
        .with("linearity", linearity)
        .with("closedness", closedness)
        .with("gamma_scale", scale);
    for (k, name) in ["w0", "w1", "w2", "w3"].iter().enumerate().take(n) {
        v = v.with(name, w[k]);
    }
    Ok(v)
}

type Evaluated = (usize, Result<Observation>);

fn observe(ctx: &Context, quantity: Quantity, plan: &SamplePlan, c: Option<f64>) -> Result<Vec<Evaluated>> {
    let flags = plan.flags(ctx.metric)?;
    Ok(flags
        .into_par_iter()
        .enumerate()
        .map(|(k, (at, u))| {
            let v = match (quantity, c) {
                (Quantity::ClosedOneForm, Some(c)) => closed_form_at(ctx.metric, &at.x, c),
                _ => ctx.evaluate(quantity, &at, &u),
            };
            let uses_u = quantity == Quantity::FlagCurvature;
            let obs = v.map(|v| Observation {
                sample: at,
                u: uses_u.then_some(u),
                value: v.value,
                scale: v.scale,
                details: v.details.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            });
            (k, obs)
        })
        .collect())
}

/// Deviation from the target and the deviation allowed, for one observation.
fn assess(target: &Target, tol: &Tolerance, value: f64, scale: f64, reference: f64) -> (f64, f64) {
    let allowed = |size: f64| match tol.kind {
        ToleranceKind::Absolute => tol.value,
        ToleranceKind::Relative => tol.value * size,
    };
    match target {
        Target::Value { value: v } => ((value - v).abs(), allowed(if *v != 0.0 { v.abs() } else { scale })),
        Target::Zero => (value.abs(), allowed(scale)),
        Target::AtMost { bound } => (value - bound, allowed(bound.abs().max(scale))),
        Target::AtLeast { bound } => (bound - value, allowed(bound.abs().max(scale))),
        Target::Constant => ((value - reference).abs(), allowed(reference.abs())),
        Target::MaxAtLeast { bound } => (bound - value, 0.0),
    }
}

/// How far past its allowance an observation is: at most 1 passes.
fn margin(deviation: f64, allowed: f64) -> f64 {
    if deviation.is_nan() {
        f64::INFINITY
    } else if allowed > 0.0 {
        deviation / allowed
    } else if deviation > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

struct Header<'a> {
    id: &'a str,
    statement: &'a str,
    quantity: Quantity,
    metric: String,
    target: &'a Target,
    tolerance: Tolerance,
    plan: &'a SamplePlan,
}

fn judge(h: Header, evaluated: Result<Vec<Evaluated>>, start: Instant) -> ClaimReport {
    let mut report = ClaimReport {
        id: h.id.to_string(),
        statement: h.statement.to_string(),
        quantity: h.quantity.name(),
        metric: h.metric,
        pass: false,
        target: h.target.clone(),
        tolerance: h.tolerance,
        seed: h.plan.seed,
        samples: h.plan.count,
        evaluated: 0,
        failures: 0,
        stats: None,
        worst: None,
        runtime_seconds: 0.0,
        diagnostic: None,
    };
    let evaluated = match evaluated {
        Ok(e) => e,
        Err(e) => {
            report.failures = h.plan.count;
            report.diagnostic = Some(format!("sampling failed: {e}"));
            report.runtime_seconds = start.elapsed().as_secs_f64();
            return report;
        }
    };
    let mut obs = Vec::new();
    let mut errors = Vec::new();
    for (k, r) in evaluated {
        match r {
            Ok(o) => obs.push((k, o)),
            Err(e) => errors.push((k, e)),
        }
    }
    report.evaluated = obs.len();
    report.failures = errors.len();
    let values: Vec<f64> = obs.iter().map(|(_, o)| o.value).collect();
    report.stats = Stats::of(&values);
    let reference = report.stats.map(|s| s.mean).unwrap_or(0.0);

    let mut worst: Option<(f64, WorstSample)> = None;
    for (k, o) in &obs {
        let (deviation, allowed) = assess(h.target, &h.tolerance, o.value, o.scale, reference);
        let m = margin(deviation, allowed);
        let replace = match &worst {
            None => true,
            Some((best, _)) => m > *best,
        };
        if replace {
            worst = Some((
                m,
                WorstSample {
                    index: *k,
                    x: o.sample.x.clone(),
                    y: o.sample.y.clone(),
                    u: o.u.clone(),
                    observed: o.value,
                    scale: o.scale,
                    deviation,
                    allowed,
                    details: o.details.clone(),
                },
            ));
        }
    }
    let values_ok = match h.target {
        _ if obs.is_empty() => false,
        Target::MaxAtLeast { bound } => values.iter().copied().fold(f64::NEG_INFINITY, f64::max) >= *bound,
        _ => worst.as_ref().is_some_and(|(m, _)| *m <= 1.0),
    };
    if let Target::MaxAtLeast { bound } = h.target {
        // report the witness instead of the weakest sample
        if let Some((k, o)) = obs
            .iter()
            .max_by(|a, b| a.1.value.partial_cmp(&b.1.value).unwrap_or(std::cmp::Ordering::Less))
        {
            worst = Some((
                0.0,
                WorstSample {
                    index: *k,
                    x: o.sample.x.clone(),
                    y: o.sample.y.clone(),
                    u: o.u.clone(),
                    observed: o.value,
                    scale: o.scale,
                    deviation: bound - o.value,
                    allowed: 0.0,
                    details: o.details.clone(),
                },
            ));
        }
    }
    report.pass = values_ok && errors.is_empty();
    report.worst = worst.map(|(_, w)| w);
    report.diagnostic = if let Some((k, e)) = errors.first() {
        Some(format!("{} of {} samples failed; first at sample {k}: {e}", errors.len(), h.plan.count))
    } else if !report.pass {
        report.worst.as_ref().map(|w| match h.target {
            Target::MaxAtLeast { bound } => {
                format!("largest observed value {:.6e} is below the witness threshold {bound:.6e}", w.observed)
            }
            _ => format!(
                "sample {} observed {:.6e}, deviation {:.3e} exceeds allowed {:.3e}",
                w.index, w.observed, w.deviation, w.allowed
            ),
        })
    } else {
        None
    };
    report.runtime_seconds = start.elapsed().as_secs_f64();
    report
}

/// Evaluate a claim on its sampling plan. Construction and geometry errors
/// end up in a failed report.
pub fn run_claim(claim: &Claim) -> ClaimReport {
    let start = Instant::now();
    let header = |metric: String| Header {
        id: &claim.id,
        statement: &claim.statement,
        quantity: claim.quantity,
        metric,
        target: &claim.target,
        tolerance: claim.tolerance,
        plan: &claim.samples,
    };
    let setup = || -> Result<(MetricField, Option<ProductParts>)> {
        claim.validate()?;
        let metric = claim.metric.build()?;
        let product = ProductParts::from_spec(&claim.metric).transpose()?;
        Ok((metric, product))
    };
    match setup() {
        Err(e) => judge(header(claim.metric.kind().to_string()), Err(e), start),
        Ok((metric, product)) => {
            let ctx = Context {
                metric: &metric,
                spec: Some(&claim.metric),
                product,
                normalize: claim.normalize,
                geodesic: claim.geodesic_plan(),
            };
            let evaluated = observe(&ctx, claim.quantity, &claim.samples, claim.constant);
            judge(header(metric.name().to_string()), evaluated, start)
        }
    }
}

/// Check that `γ = S − (n+1)cF` is a closed 1-form: at each base point of
/// `samples`, `γ_x` is fitted by a linear form over `max(4n, 8)` directions
/// and its coefficients are differenced in `x`. The observed value is
/// `max(fit residual / max(|γ|, F), |∂_m w_k − ∂_k w_m|)`.
pub fn closed_one_form_check(metric: &MetricField, c: f64, samples: &SamplePlan, tol: f64) -> ClaimReport {
    let start = Instant::now();
    let ctx = Context {
        metric,
        spec: None,
        product: None,
        normalize: Normalize::None,
        geodesic: GeodesicPlan::default(),
    };
    let evaluated = observe(&ctx, Quantity::ClosedOneForm, samples, Some(c));
    judge(
        Header {
            id: "closed_one_form",
            statement: "S - (n+1)cF is a closed 1-form",
            quantity: Quantity::ClosedOneForm,
            metric: metric.name().to_string(),
            target: &Target::Zero,
            tolerance: Tolerance::absolute(tol),
            plan: samples,
        },
        evaluated,
        start,
    )
}

/// Run every claim with at most `jobs` worker threads (0 means one per core).
/// Reports are sorted by claim id.
pub fn run_suite(claims: &[Claim], jobs: usize) -> SuiteReport {
    let start = Instant::now();
    let run = || claims.par_iter().map(run_claim).collect::<Vec<_>>();
    let reports = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => claims.iter().map(run_claim).collect(),
    };
    SuiteReport::from_reports(reports, start.elapsed().as_secs_f64())
}
