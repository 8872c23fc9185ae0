use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{fundamental_tensor, mean_cartan, riemann, spray, MetricField, TangentSample};
use crate::jets::{layout, Jet1};
use crate::zoo::{
    riemannian_factor, szabo_factors, szabo_product_from_spec, FactorSpec, LinearProfile, MetricSpec, Profile,
    ProfileSpec, SzaboProfile,
};

/// A product metric `F = √f(α₁², α₂²)` together with its factors, so that
/// the block identities can be checked against the assembled metric.
#[derive(Debug, Clone)]
pub struct ProductParts {
    pub factor1: FactorSpec,
    pub factor2: FactorSpec,
    pub profile: ProfileSpec,
    pub metric: MetricField,
    alpha1: MetricField,
    alpha2: MetricField,
}

/// Relative errors of the product identities at one sample.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ProductErrors {
    /// `g_ij` against the block formula in `f_s, f_t, f_ss, f_st, f_tt`.
    pub blocks: f64,
    /// `det g` against `h(α₁², α₂²) det ḡ₁ det ḡ₂`.
    pub determinant: f64,
    /// `Gⁱ` against the factor sprays.
    pub spray_split: f64,
    /// `I_a = (h_s/h) ȳ_a`, `I_α = (h_t/h) ȳ_α`.
    pub cartan: f64,
    /// `R_ij` against `diag(f_s R̄_ab, f_t R̄_αβ)`.
    pub curvature: f64,
}

impl ProductErrors {
    pub fn max(&self) -> f64 {
        [self.blocks, self.determinant, self.spray_split, self.cartan, self.curvature]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `f` and its partial derivatives up to order three.
#[derive(Debug, Clone, Copy)]
struct Profile3 {
    f: f64,
    fs: f64,
    ft: f64,
    fss: f64,
    fst: f64,
    ftt: f64,
    fsst: f64,
    fstt: f64,
}

fn profile3<P: Profile>(p: &P, s: f64, t: f64) -> Profile3 {
    let lay = layout::layout(2, 3).expect("two directions, order three");
    let f = p.eval(Jet1::variable(s, &[1.0, 0.0], lay), Jet1::variable(t, &[0.0, 1.0], lay));
    Profile3 {
        f: *f.value(),
        fs: f.d(&[0]),
        ft: f.d(&[1]),
        fss: f.d(&[0, 0]),
        fst: f.d(&[0, 1]),
        ftt: f.d(&[1, 1]),
        fsst: f.d(&[0, 0, 1]),
        fstt: f.d(&[0, 1, 1]),
    }
}

impl Profile3 {
    /// `(h, h_s, h_t)` for `h = f_s^{n₁−1} f_t^{n₂−1} (f_s f_t − 2 f f_st)`.
    fn h(&self, n1: usize, n2: usize) -> (f64, f64, f64) {
        let (p1, p2) = (n1 as i32 - 1, n2 as i32 - 1);
        let a = self.fs.powi(p1);
        let b = self.ft.powi(p2);
        let c = self.fs * self.ft - 2.0 * self.f * self.fst;
        let da = |d: f64| if p1 == 0 { 0.0 } else { p1 as f64 * self.fs.powi(p1 - 1) * d };
        let db = |d: f64| if p2 == 0 { 0.0 } else { p2 as f64 * self.ft.powi(p2 - 1) * d };
        let cs = self.fss * self.ft + self.fs * self.fst - 2.0 * self.fs * self.fst - 2.0 * self.f * self.fsst;
        let ct = self.fst * self.ft + self.fs * self.ftt - 2.0 * self.ft * self.fst - 2.0 * self.f * self.fstt;
        let h = a * b * c;
        let hs = da(self.fss) * b * c + a * db(self.fst) * c + a * b * cs;
        let ht = da(self.fst) * b * c + a * db(self.ftt) * c + a * b * ct;
        (h, hs, ht)
    }
}

fn rel(err: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn factor_sample(metric: &MetricField, x: &[f64], y: &[f64]) -> Option<TangentSample> {
    metric.sample(x, y).ok()
}

impl ProductParts {
    pub fn new(factor1: FactorSpec, factor2: FactorSpec, profile: ProfileSpec) -> Result<Self> {
        let metric = szabo_product_from_spec(&factor1, &factor2, &profile)?;
        let alpha1 = riemannian_factor(factor1.dimension, &factor1.model)?;
        let alpha2 = riemannian_factor(factor2.dimension, &factor2.model)?;
        Ok(ProductParts {
            factor1,
            factor2,
            profile,
            metric,
            alpha1,
            alpha2,
        })
    }

    /// Factors and profile of a product spec; `None` for other families.
    pub fn from_spec(spec: &MetricSpec) -> Option<Result<Self>> {
        match spec {
            MetricSpec::SzaboProduct {
                factor1,
                factor2,
                profile,
            } => Some(Self::new(factor1.clone(), factor2.clone(), profile.clone())),
            MetricSpec::SzaboEpsilon { epsilon } => {
                let (a, b) = szabo_factors();
                Some(Self::new(a, b, ProfileSpec::Szabo { epsilon: *epsilon }))
            }
            _ => None,
        }
    }

    fn derivatives(&self, s: f64, t: f64) -> Profile3 {
        match &self.profile {
            ProfileSpec::Linear => profile3(&LinearProfile, s, t),
            ProfileSpec::Szabo { epsilon } => profile3(&SzaboProfile { epsilon: *epsilon }, s, t),
        }
    }

    /// Every product identity at `at`, each as a relative error.
    pub fn errors(&self, at: &TangentSample) -> Result<ProductErrors> {
        let n1 = self.factor1.dimension;
        let n2 = self.factor2.dimension;
        let n = n1 + n2;
        if at.x.len() != n {
            return Err(Error::Dimension { expected: n, got: at.x.len() });
        }
        let (x1, x2) = at.x.split_at(n1);
        let (y1, y2) = at.y.split_at(n1);
        let gb1 = self.factor1.model.matrix(x1);
        let gb2 = self.factor2.model.matrix(x2);
        let yb1 = &gb1 * DVector::from_row_slice(y1);
        let yb2 = &gb2 * DVector::from_row_slice(y2);
        let s = yb1.dot(&DVector::from_row_slice(y1));
        let t = yb2.dot(&DVector::from_row_slice(y2));
        let d = self.derivatives(s, t);

        let mut ybar = DVector::zeros(n);
        ybar.rows_mut(0, n1).copy_from(&yb1);
        ybar.rows_mut(n1, n2).copy_from(&yb2);
        let mut block = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let c = match (i < n1, j < n1) {
                    (true, true) => d.fss,
                    (false, false) => d.ftt,
                    _ => d.fst,
                };
                block[(i, j)] = 2.0 * c * ybar[i] * ybar[j];
            }
        }
        for a in 0..n1 {
            for b in 0..n1 {
                block[(a, b)] += d.fs * gb1[(a, b)];
            }
        }
        for a in 0..n2 {
            for b in 0..n2 {
                block[(n1 + a, n1 + b)] += d.ft * gb2[(a, b)];
            }
        }

        let ft = fundamental_tensor(&self.metric, at)?;
        let blocks = rel(max_abs(&(&ft.g - &block)), max_abs(&ft.g));

        let (h, hs, ht) = d.h(n1, n2);
        let det = ft.determinant();
        let det_formula = h * gb1.determinant() * gb2.determinant();
        let determinant = rel((det - det_formula).abs(), det.abs());

        let g_full = spray(&self.metric, at)?.g_coeffs;
        let mut g_split = DVector::zeros(n);
        if let Some(a1) = factor_sample(&self.alpha1, x1, y1) {
            g_split.rows_mut(0, n1).copy_from(&spray(&self.alpha1, &a1)?.g_coeffs);
        }
        if let Some(a2) = factor_sample(&self.alpha2, x2, y2) {
            g_split.rows_mut(n1, n2).copy_from(&spray(&self.alpha2, &a2)?.g_coeffs);
        }
        let f2 = d.f;
        let spray_split = rel((&g_full - &g_split).amax(), f2);

        let cartan = mean_cartan(&self.metric, at)?;
        let mut formula = DVector::zeros(n);
        for i in 0..n {
            formula[i] = if i < n1 { hs / h } else { ht / h } * ybar[i];
        }
        let cartan_scale = cartan.covariant.amax().max(formula.amax()).max(f64::MIN_POSITIVE);
        let cartan_err = rel((&cartan.covariant - &formula).amax(), cartan_scale);

        let r_full = riemann(&self.metric, at)?.r_lowered;
        let mut r_blocks = DMatrix::zeros(n, n);
        if let Some(a1) = factor_sample(&self.alpha1, x1, y1) {
            let r1 = riemann(&self.alpha1, &a1)?.r_lowered;
            r_blocks.view_mut((0, 0), (n1, n1)).copy_from(&(r1 * d.fs));
        }
        if let Some(a2) = factor_sample(&self.alpha2, x2, y2) {
            let r2 = riemann(&self.alpha2, &a2)?.r_lowered;
            r_blocks.view_mut((n1, n1), (n2, n2)).copy_from(&(r2 * d.ft));
        }
        let curvature = rel(max_abs(&(&r_full - &r_blocks)), max_abs(&r_full).max(f2));

        Ok(ProductErrors {
            blocks,
            determinant,
            spray_split,
            cartan: cartan_err,
            curvature,
        })
    }
}
