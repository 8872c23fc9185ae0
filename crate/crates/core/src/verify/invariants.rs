//! Identities every Finsler metric satisfies, checked on a sampling plan.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::SamplePlan;
use crate::error::Result;
use crate::geometry::{fundamental_tensor, riemann, torsion_bundle, MetricField, TangentSample};

/// `|F(x, λy) − λF(x, y)| / λF(x, y)` for `λ ∈ {0.37, 2.9}`.
pub const HOMOGENEITY_TOL: f64 = 1e-12;
/// `|g_ij yⁱyʲ − F²| / F²`.
pub const NORM_IDENTITY_TOL: f64 = 1e-10;
/// `|𝐑_y(y)| / ((‖𝐑_y‖ + F²)|y|)`.
pub const RIEMANN_KILLS_Y_TOL: f64 = 1e-8;
/// Antisymmetric part of `R_jk` relative to `max |R_jk| + F² max |g_jk|`.
pub const RIEMANN_SYMMETRY_TOL: f64 = 1e-8;
/// `|I_i yⁱ| / max(1, ‖𝐈‖F)` and `|J_i yⁱ| / (F max(1, ‖𝐉‖))`.
pub const TORSION_ORTHOGONALITY_TOL: f64 = 1e-9;
/// `|K(P, y) − K(P, y)|` for two spanning vectors of the same flag, relative
/// to `max(1, |K|)` and multiplied by the smaller normalized Gram determinant
/// of the two flags (the quotient amplifies errors in `𝐑_y` by its inverse).
pub const FLAG_POLE_TOL: f64 = 1e-8;

/// Worst violation of one identity over a sampling plan.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_sample: Option<TangentSample>,
}

const NAMES: [(&str, f64); 8] = [
    ("homogeneity", HOMOGENEITY_TOL),
    ("g_positive_definite", 0.0),
    ("g_yy_equals_f2", NORM_IDENTITY_TOL),
    ("riemann_kills_y", RIEMANN_KILLS_Y_TOL),
    ("riemann_g_symmetric", RIEMANN_SYMMETRY_TOL),
    ("cartan_orthogonal_to_y", TORSION_ORTHOGONALITY_TOL),
    ("landsberg_orthogonal_to_y", TORSION_ORTHOGONALITY_TOL),
    ("flag_pole_invariance", FLAG_POLE_TOL),
];

fn violations(metric: &MetricField, at: &TangentSample, u: &[f64]) -> Result<[f64; 8]> {
    let (x, y) = (&at.x, &at.y);
    let f = metric.value(x, y);
    let mut out = [0.0f64; 8];
    for lambda in [0.37, 2.9] {
        let ly: Vec<f64> = y.iter().map(|v| v * lambda).collect();
        out[0] = out[0].max((metric.value(x, &ly) - lambda * f).abs() / (lambda * f));
    }
    let ft = fundamental_tensor(metric, at)?;
    let eig = ft.g.clone().symmetric_eigen().eigenvalues;
    out[1] = if eig.min() > 0.0 { 0.0 } else { 1.0 };
    let yv = DVector::from_row_slice(y);
    out[2] = (ft.inner(&yv, &yv) - f * f).abs() / (f * f);

    let r = riemann(metric, at)?;
    out[3] = (&r.r * &yv).norm() / ((r.scale() + f * f) * yv.norm());
    let low = &r.r_lowered;
    let size = low.amax() + f * f * ft.g.amax();
    out[4] = (low - low.transpose()).amax() / size;

    let b = torsion_bundle(metric, at)?;
    out[5] = b.cartan.contract_y().abs() / (b.cartan.norm() * f).max(1.0);
    out[6] = b.landsberg.contract_y().abs() / (f * b.landsberg.norm().max(1.0));

    let u1 = DVector::from_row_slice(u);
    let u2 = &u1 * -1.3 + &yv * 0.7;
    let k1 = r.flag_curvature(&u1)?;
    let k2 = r.flag_curvature(&u2)?;
    let gram = |u: &DVector<f64>| {
        let (yy, uu, yu) = (ft.inner(&yv, &yv), ft.inner(u, u), ft.inner(&yv, u));
        (yy * uu - yu * yu) / (yy * uu)
    };
    out[7] = (k1 - k2).abs() * gram(&u1).min(gram(&u2)) / k1.abs().max(1.0);
    Ok(out)
}

/// Check homogeneity, positivity of `g`, `g_ij yⁱyʲ = F²`, `𝐑_y(y) = 0`,
/// `𝐠_y`-symmetry of `𝐑_y`, `𝐈(y) = 𝐉(y) = 0` and independence of the flag
/// curvature from the spanning vector, on `plan`.
pub fn universal_invariants(metric: &MetricField, plan: &SamplePlan) -> Result<Vec<InvariantCheck>> {
    let flags = plan.flags(metric)?;
    let rows: Vec<(TangentSample, [f64; 8])> = flags
        .into_par_iter()
        .map(|(at, u)| violations(metric, &at, &u).map(|v| (at, v)))
        .collect::<Result<_>>()?;
    Ok(NAMES
        .iter()
        .enumerate()
        .map(|(k, (name, tolerance))| {
            let worst = rows
                .iter()
                .max_by(|a, b| a.1[k].total_cmp(&b.1[k]));
            let value = worst.map(|w| w.1[k]).unwrap_or(0.0);
            InvariantCheck {
                name,
                worst: value,
                tolerance: *tolerance,
                pass: value <= *tolerance,
                worst_sample: worst.map(|w| w.0.clone()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn funk_satisfies_every_invariant() {
        let m = zoo::funk_ball_shifted(&[0.3, 0.0]).unwrap();
        for c in universal_invariants(&m, &SamplePlan::new(20, 4)).unwrap() {
            assert!(c.pass, "{} {}", c.name, c.worst);
        }
    }
}
