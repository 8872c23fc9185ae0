#![allow(dead_code)]

use std::path::PathBuf;

use finsler::flow::{integrate_geodesic, torsion_trace};
use finsler::geometry::{fundamental_tensor, MetricField, TangentSample};
use finsler::jets::{self, Jet1};
use finsler::verify::{ClaimSuite, SamplePlan};
use rayon::prelude::*;

pub fn manifest_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

pub fn acceptance_claims() -> ClaimSuite {
    ClaimSuite::load(manifest_path("claims/acceptance.toml")).expect("shipped claims parse")
}

/// Mean over `count` unit-speed geodesics of the largest interior residual
/// of `D²𝐈 + 𝐑(𝐈)`, integrated over `[0, span]` with tolerance `tol`.
pub fn mean_interior_residual(metric: &MetricField, count: usize, seed: u64, span: f64, tol: f64) -> f64 {
    let samples = SamplePlan::new(count, seed).tangent_samples(metric).unwrap();
    let residuals: Vec<f64> = samples
        .par_iter()
        .map(|at| {
            let f = metric.value(&at.x, &at.y);
            let y: Vec<f64> = at.y.iter().map(|v| v / f).collect();
            let tr = integrate_geodesic(metric, &at.x, &y, (0.0, span), tol).unwrap();
            torsion_trace(metric, &tr).unwrap().max_interior_residual()
        })
        .collect();
    residuals.iter().sum::<f64>() / residuals.len() as f64
}

fn richardson(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn richardson_mixed(f: impl Fn(f64, f64) -> f64, h: f64) -> f64 {
    let d = |h: f64| (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn relative(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale
}

/// Worst relative disagreement between jet derivatives (`∂F/∂x`, `∂F/∂y`
/// and `g_ij`) and Richardson-extrapolated central differences at `at`.
pub fn jet_vs_richardson(metric: &MetricField, at: &TangentSample) -> f64 {
    let n = metric.dimension();
    let point: Vec<f64> = at.x.iter().chain(&at.y).copied().collect();
    let dirs: Vec<Vec<f64>> = (0..2 * n)
        .map(|k| (0..2 * n).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();
    let vars: Vec<Jet1> = jets::seed(&point, &dirs, 1).unwrap();
    let fj = metric.eval(&vars[..n], &vars[n..]);
    let jet_grad: Vec<f64> = (0..2 * n).map(|k| fj.derivative(&[k]).unwrap()).collect();

    let eval_shift = |k: usize, h: f64| {
        let mut p = point.clone();
        p[k] += h;
        metric.value(&p[..n], &p[n..])
    };
    let h = 2e-4;
    let fd_grad: Vec<f64> = (0..2 * n).map(|k| richardson(|s| eval_shift(k, s), h)).collect();

    let g = fundamental_tensor(metric, at).unwrap().g;
    let f2 = |i: usize, j: usize, a: f64, b: f64| {
        let mut y = at.y.clone();
        y[i] += a;
        y[j] += b;
        metric.value(&at.x, &y).powi(2)
    };
    let mut jet_g = Vec::new();
    let mut fd_g = Vec::new();
    let hy = 2e-3 * at.y.iter().map(|v| v * v).sum::<f64>().sqrt();
    for i in 0..n {
        for j in 0..n {
            jet_g.push(g[(i, j)]);
            fd_g.push(0.5 * richardson_mixed(|a, b| f2(i, j, a, b), hy));
        }
    }
    relative(&jet_grad, &fd_grad).max(relative(&jet_g, &fd_g))
}
