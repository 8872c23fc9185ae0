use nalgebra::DVector;

use super::geodesic::GeodesicTrace;
use super::ode::{self, OdeOptions};
use crate::error::{Error, Result};
use crate::geometry::{curvature::riemann_from_jet, spray_jet, MetricField};

/// A Jacobi field and its covariant derivative on the trace nodes.
#[derive(Debug, Clone)]
pub struct JacobiField {
    pub values: Vec<Vec<f64>>,
    pub derivatives: Vec<Vec<f64>>,
}

/// Right-hand side of the geodesic together with `W = D_σ̇V`:
/// `V̇ = W − N V`, `Ẇ = −N W − 𝐑_σ̇ V`.
fn jacobi_rhs(metric: &MetricField, state: &[f64]) -> Result<Vec<f64>> {
    let n = metric.dimension();
    let x = &state[..n];
    if !metric.domain().contains(x) {
        return Err(Error::OutOfDomain(x.to_vec()));
    }
    let at = metric.sample(x, &state[n..2 * n])?;
    let jet = spray_jet(metric, &at)?;
    let r = riemann_from_jet(&jet, &at).r;
    let v = DVector::from_row_slice(&state[2 * n..3 * n]);
    let w = DVector::from_row_slice(&state[3 * n..]);
    let dv = &w - &jet.dy * &v;
    let dw = -(&jet.dy * &w) - r * &v;
    let mut out = Vec::with_capacity(4 * n);
    out.extend_from_slice(&state[n..2 * n]);
    out.extend(jet.spray.iter().map(|g| -2.0 * g));
    out.extend(dv.iter());
    out.extend(dw.iter());
    Ok(out)
}

/// Integrate `D_σ̇D_σ̇V + 𝐑_σ̇(V) = 0` along `trace` from `V(t₀) = v0`,
/// `D_σ̇V(t₀) = dv0`, returning `V` and `D_σ̇V` on the trace nodes.
pub fn jacobi_field(metric: &MetricField, trace: &GeodesicTrace, v0: &[f64], dv0: &[f64]) -> Result<JacobiField> {
    let n = metric.dimension();
    for v in [v0, dv0] {
        if v.len() != n {
            return Err(Error::Dimension { expected: n, got: v.len() });
        }
    }
    let mut state0 = Vec::with_capacity(4 * n);
    state0.extend_from_slice(&trace.positions[0]);
    state0.extend_from_slice(&trace.velocities[0]);
    state0.extend_from_slice(v0);
    state0.extend_from_slice(dv0);
    let sol = ode::integrate(
        |_, s| jacobi_rhs(metric, s),
        |s| metric.domain().contains(&s[..n]),
        trace.start(),
        &state0,
        trace.end(),
        &OdeOptions::with_tolerance(trace.tol),
    )?;
    let mut values = Vec::with_capacity(trace.len());
    let mut derivatives = Vec::with_capacity(trace.len());
    for &t in &trace.times {
        let s = sol.eval(t.min(sol.t_end));
        values.push(s[2 * n..3 * n].to_vec());
        derivatives.push(s[3 * n..].to_vec());
    }
    Ok(JacobiField { values, derivatives })
}

/// `V(t)` on the trace nodes; see [`jacobi_field`].
pub fn jacobi_propagate(metric: &MetricField, trace: &GeodesicTrace, v0: &[f64], dv0: &[f64]) -> Result<Vec<Vec<f64>>> {
    Ok(jacobi_field(metric, trace, v0, dv0)?.values)
}
