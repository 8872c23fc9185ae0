use nalgebra::{DMatrix, DVector};

use super::geodesic::{covariant_with, time_derivative, GeodesicTrace};
use crate::error::Result;
use crate::geometry::{riemann, torsion_bundle, MetricField};

/// Mean Cartan torsion `𝐈(t)` along a geodesic with its covariant derivatives.
#[derive(Debug, Clone)]
pub struct TorsionTrace {
    pub trace: GeodesicTrace,
    /// `Iⁱ(σ, σ̇)`.
    pub i_of_t: Vec<Vec<f64>>,
    /// `D_σ̇ 𝐈` by differentiating `Iⁱ(t)` along the trace.
    pub di_of_t: Vec<Vec<f64>>,
    /// `Jⁱ(σ, σ̇)` evaluated pointwise; equals `D_σ̇ 𝐈`.
    pub j_of_t: Vec<Vec<f64>>,
    /// `D_σ̇ D_σ̇ 𝐈 = D_σ̇ 𝐉`.
    pub d2i_of_t: Vec<Vec<f64>>,
    /// `φ = √(𝐠_σ̇(𝐈, 𝐈))`.
    pub phi_of_t: Vec<f64>,
    /// `‖D_σ̇D_σ̇𝐈 + 𝐑_σ̇(𝐈)‖_𝐠`.
    pub residual_of_t: Vec<f64>,
    /// `max_t ‖D_σ̇𝐈 − 𝐉‖_𝐠` between the two derivative computations.
    pub di_discrepancy: f64,
    pub(crate) g_of_t: Vec<DMatrix<f64>>,
}

fn g_norm(g: &DMatrix<f64>, v: &[f64]) -> f64 {
    let v = DVector::from_row_slice(v);
    v.dot(&(g * &v)).max(0.0).sqrt()
}

fn g_inner(g: &DMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    DVector::from_row_slice(u).dot(&(g * DVector::from_row_slice(v)))
}

/// Evaluate `𝐈`, `𝐉`, `D𝐈`, `D²𝐈`, `φ` and the residual of
/// `D_σ̇D_σ̇𝐈 + 𝐑_σ̇(𝐈) = 0` on every node of `trace`.
pub fn torsion_trace(metric: &MetricField, trace: &GeodesicTrace) -> Result<TorsionTrace> {
    let mut i_of_t = Vec::with_capacity(trace.len());
    let mut j_of_t = Vec::with_capacity(trace.len());
    let mut connections = Vec::with_capacity(trace.len());
    let mut g_of_t = Vec::with_capacity(trace.len());
    let mut r_of_t = Vec::with_capacity(trace.len());
    for (x, y) in trace.positions.iter().zip(&trace.velocities) {
        let at = metric.sample(x, y)?;
        let b = torsion_bundle(metric, &at)?;
        i_of_t.push(b.cartan.contravariant.as_slice().to_vec());
        j_of_t.push(b.landsberg.contravariant.as_slice().to_vec());
        connections.push(b.connection);
        g_of_t.push(b.g);
        r_of_t.push(riemann(metric, &at)?.r);
    }
    let di_of_t = covariant_with(&connections, &i_of_t, time_derivative(trace, &i_of_t)?);
    let d2i_of_t = covariant_with(&connections, &j_of_t, time_derivative(trace, &j_of_t)?);
    let mut phi_of_t = Vec::with_capacity(trace.len());
    let mut residual_of_t = Vec::with_capacity(trace.len());
    let mut di_discrepancy: f64 = 0.0;
    for k in 0..trace.len() {
        let g = &g_of_t[k];
        phi_of_t.push(g_norm(g, &i_of_t[k]));
        let ri = &r_of_t[k] * DVector::from_row_slice(&i_of_t[k]);
        let res: Vec<f64> = d2i_of_t[k].iter().zip(ri.iter()).map(|(a, b)| a + b).collect();
        residual_of_t.push(g_norm(g, &res));
        let diff: Vec<f64> = di_of_t[k].iter().zip(&j_of_t[k]).map(|(a, b)| a - b).collect();
        di_discrepancy = di_discrepancy.max(g_norm(g, &diff));
    }
    Ok(TorsionTrace {
        trace: trace.clone(),
        i_of_t,
        di_of_t,
        j_of_t,
        d2i_of_t,
        phi_of_t,
        residual_of_t,
        di_discrepancy,
        g_of_t,
    })
}

impl TorsionTrace {
    pub fn max_phi(&self) -> f64 {
        self.phi_of_t.iter().copied().fold(0.0, f64::max)
    }

    /// Largest residual over the interior nodes.
    pub fn max_interior_residual(&self) -> f64 {
        let m = self.residual_of_t.len();
        self.residual_of_t[1..m - 1].iter().copied().fold(0.0, f64::max)
    }

    /// `(max φ − min φ) / max φ`.
    pub fn phi_variation(&self) -> f64 {
        let max = self.max_phi();
        let min = self.phi_of_t.iter().copied().fold(f64::INFINITY, f64::min);
        if max > 0.0 {
            (max - min) / max
        } else {
            0.0
        }
    }

    /// `φ′ = 𝐠(𝐈, 𝐉)/φ` at each node (zero where `φ` vanishes).
    pub fn phi_prime(&self) -> Vec<f64> {
        (0..self.phi_of_t.len())
            .map(|k| {
                let phi = self.phi_of_t[k];
                if phi > 0.0 {
                    g_inner(&self.g_of_t[k], &self.i_of_t[k], &self.j_of_t[k]) / phi
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Numerical `φ″`: the spectral derivative of [`TorsionTrace::phi_prime`].
    pub fn phi_second_derivative(&self) -> Vec<f64> {
        self.trace.differentiator().apply(&self.phi_prime())
    }

    /// `𝐠(D²𝐈, 𝐈) + 𝐠(𝐉, 𝐉)`, which equals `½(φ²)″`.
    pub fn half_phi_squared_second_derivative(&self) -> Vec<f64> {
        (0..self.phi_of_t.len())
            .map(|k| {
                let g = &self.g_of_t[k];
                g_inner(g, &self.d2i_of_t[k], &self.i_of_t[k]) + g_inner(g, &self.j_of_t[k], &self.j_of_t[k])
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::integrate_geodesic;
    use crate::zoo::{self, RiemannianModel};

    #[test]
    fn riemannian_torsion_trace_vanishes() {
        let m = zoo::riemannian(2, &RiemannianModel::HyperbolicDisk).unwrap();
        let tr = integrate_geodesic(&m, &[0.1, 0.0], &[0.3, 0.4], (0.0, 1.0), 1e-10).unwrap();
        let tt = torsion_trace(&m, &tr).unwrap();
        assert!(tt.max_phi() < 1e-10);
        assert!(tt.residual_of_t.iter().all(|r| *r < 1e-9));
    }

    #[test]
    fn shifted_funk_residual_is_small() {
        let m = zoo::funk_ball_shifted(&[0.3, 0.0]).unwrap();
        let tr = integrate_geodesic(&m, &[0.1, -0.2], &[0.4, 0.7], (0.0, 1.0), 1e-10).unwrap();
        let tt = torsion_trace(&m, &tr).unwrap();
        assert!(tt.di_discrepancy < 1e-5, "{}", tt.di_discrepancy);
        assert!(tt.max_interior_residual() <= 1e-4 * tt.max_phi(), "{}", tt.max_interior_residual());
    }
}
