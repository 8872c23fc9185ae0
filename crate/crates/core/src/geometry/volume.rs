//! Busemann–Hausdorff volume density, distortion and S-curvature.

use nalgebra::{DMatrix, DVector};

use super::metric::{MetricField, TangentSample};
use super::quadrature::{self, Estimate, SphereRule};
use super::spray::{spray, unit_dirs};
use super::tensor::fundamental_tensor;
use crate::error::{Error, Result};
use crate::jets::{self, Jet1};

/// Relative agreement demanded between the fine and half-resolution rules.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;
/// Relative standard error accepted from the quasi–Monte Carlo rule.
pub const QMC_TOLERANCE: f64 = 1e-3;

fn check_x(metric: &MetricField, x: &[f64]) -> Result<()> {
    if x.len() != metric.dimension() {
        return Err(Error::Dimension {
            expected: metric.dimension(),
            got: x.len(),
        });
    }
    if !metric.domain().contains(x) {
        return Err(Error::OutOfDomain(x.to_vec()));
    }
    Ok(())
}

fn finite_or_err(v: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            x: x.to_vec(),
            y: y.to_vec(),
        })
    }
}

/// Unimodular `A` making the unit ball of `F(x, A·)` close to round.
///
/// `Vol{F < 1}` is unchanged under `y ↦ Ay` when `det A = 1`, so every
/// integral below is taken over `F(x, Aθ)`. `A` is the normalized square root
/// of the covariance of the unit ball, which is exact for Riemannian `F`.
pub fn preconditioner(metric: &MetricField, x: &[f64]) -> Result<DMatrix<f64>> {
    let n = x.len();
    let rule = quadrature::rule(n, true);
    let mut a = DMatrix::<f64>::identity(n, n);
    for _ in 0..3 {
        // covariance of the uniform measure on {F < 1}, from its first three moments
        let mut m0 = 0.0;
        let mut m1 = DVector::<f64>::zeros(n);
        let mut m2 = DMatrix::<f64>::zeros(n, n);
        for (v, w) in rule.nodes.iter().zip(&rule.weights) {
            let y = &a * DVector::from_row_slice(v);
            let f = metric.value(x, y.as_slice());
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::NonFinite {
                    x: x.to_vec(),
                    y: y.as_slice().to_vec(),
                });
            }
            let r = 1.0 / f;
            let rn = w * r.powi(n as i32);
            m0 += rn / n as f64;
            for i in 0..n {
                m1[i] += rn * r * v[i] / (n + 1) as f64;
                for j in 0..n {
                    m2[(i, j)] += rn * r * r * v[i] * v[j] / (n + 2) as f64;
                }
            }
        }
        let mean = &m1 / m0;
        let c = &m2 / m0 - &mean * mean.transpose();
        let eig = c.symmetric_eigen();
        let det: f64 = eig.eigenvalues.iter().product();
        let scale = det.powf(-1.0 / (2.0 * n as f64));
        let root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.sqrt() * scale))
            * eig.eigenvectors.transpose();
        a = &a * root;
    }
    Ok(a)
}

/// `∮ F(x, Aθ)^{-n} dΩ` on one rule.
fn inverse_power_integral(metric: &MetricField, x: &[f64], a: &DMatrix<f64>, rule: &SphereRule) -> Result<Estimate> {
    let n = x.len() as i32;
    let mut bad = None;
    let [e] = rule.integrate_many(|v| {
        let v = (a * DVector::from_row_slice(v)).as_slice().to_vec();
        let v = &v[..];
        let f = metric.value(x, v);
        if !(f.is_finite() && f > 0.0) {
            bad = Some(v.to_vec());
        }
        [f.powi(-n)]
    });
    match bad {
        Some(y) => finite_or_err(f64::NAN, x, &y).map(|_| e),
        None => Ok(e),
    }
}

fn accept(fine: f64, coarse_or_err: f64, qmc: bool) -> Result<f64> {
    let (err, tol) = if qmc {
        (coarse_or_err, QMC_TOLERANCE)
    } else {
        ((fine - coarse_or_err).abs(), QUADRATURE_TOLERANCE)
    };
    if err > tol * fine.abs().max(1e-300) {
        return Err(Error::Quadrature {
            estimate: fine,
            error: err,
        });
    }
    Ok(fine)
}

/// `σ_F(x) = Vol(Bⁿ) / [(1/n) ∮ F(x, θ)^{-n} dΩ]`.
pub fn volume_density(metric: &MetricField, x: &[f64]) -> Result<f64> {
    check_x(metric, x)?;
    let n = metric.dimension();
    let a = preconditioner(metric, x)?;
    let fine = inverse_power_integral(metric, x, &a, quadrature::rule(n, false))?;
    let reference = if n <= 3 {
        inverse_power_integral(metric, x, &a, quadrature::rule(n, true))?.value
    } else {
        fine.error
    };
    let integral = accept(fine.value, reference, n > 3)?;
    Ok(quadrature::unit_ball_volume(n) * n as f64 / integral)
}

/// `∂ ln σ_F / ∂xᵐ` for every `m`, by differentiating under the integral:
/// `n ∮ F^{-(n+1)} ∂F/∂xᵐ dΩ / ∮ F^{-n} dΩ`.
pub fn log_density_gradient(metric: &MetricField, x: &[f64]) -> Result<Vec<f64>> {
    check_x(metric, x)?;
    let n = metric.dimension();
    let xs: Vec<Jet1> = jets::seed(x, &unit_dirs(n, n, 0), 1)?;
    let a = preconditioner(metric, x)?;
    let eval = |rule: &SphereRule| -> Result<(Vec<f64>, f64, f64)> {
        let mut num = vec![0.0; n];
        let mut den = 0.0;
        let mut bad = None;
        let mut values = Vec::with_capacity(rule.nodes.len());
        for (v, w) in rule.nodes.iter().zip(&rule.weights) {
            let v = (&a * DVector::from_row_slice(v)).as_slice().to_vec();
            let ys: Vec<Jet1> = v.iter().map(|&c| Jet1::constant(c)).collect();
            let f = metric.eval(&xs, &ys);
            let f0 = *f.value();
            if !(f0.is_finite() && f0 > 0.0) {
                bad = Some(v);
                break;
            }
            let p = f0.powi(-(n as i32));
            den += w * p;
            let q = p / f0;
            let mut row = Vec::with_capacity(n);
            for (m, slot) in num.iter_mut().enumerate() {
                let d = f.d(&[m]) * q;
                *slot += w * d;
                row.push(d);
            }
            values.push(row);
        }
        if let Some(y) = bad {
            finite_or_err(f64::NAN, x, &y)?;
        }
        let grad: Vec<f64> = num.iter().map(|v| n as f64 * v / den).collect();
        // batch standard error of the gradient (QMC only)
        let stderr = match rule.batches {
            Some(b) => {
                let per = rule.nodes.len() / b;
                let mut worst: f64 = 0.0;
                for m in 0..n {
                    let means: Vec<f64> = (0..b)
                        .map(|k| {
                            (k * per..(k + 1) * per)
                                .map(|i| values[i][m] * rule.weights[i] * b as f64)
                                .sum::<f64>()
                                * n as f64
                                / den
                        })
                        .collect();
                    let mean = means.iter().sum::<f64>() / b as f64;
                    let var = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b as f64 - 1.0);
                    worst = worst.max((var / b as f64).sqrt());
                }
                worst
            }
            None => 0.0,
        };
        Ok((grad, den, stderr))
    };
    let (grad, _, stderr) = eval(quadrature::rule(n, false))?;
    let scale = 1.0 + grad.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let err = if n <= 3 {
        let (coarse, _, _) = eval(quadrature::rule(n, true))?;
        grad.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        stderr
    };
    let tol = if n <= 3 { QUADRATURE_TOLERANCE } else { QMC_TOLERANCE };
    if err > tol * scale {
        return Err(Error::Quadrature {
            estimate: grad.iter().map(|v| v.abs()).fold(0.0, f64::max),
            error: err,
        });
    }
    Ok(grad)
}

/// `yᵐ ∂ ln σ_F / ∂xᵐ`.
pub fn log_density_derivative(metric: &MetricField, x: &[f64], v: &[f64]) -> Result<f64> {
    let grad = log_density_gradient(metric, x)?;
    Ok(grad.iter().zip(v).map(|(a, b)| a * b).sum())
}

/// Distortion `τ = ln(√det g(x, y) / σ_F(x))`.
pub fn distortion(metric: &MetricField, at: &TangentSample) -> Result<f64> {
    let det = fundamental_tensor(metric, at)?.determinant();
    let sigma = volume_density(metric, &at.x)?;
    Ok(0.5 * det.ln() - sigma.ln())
}

/// `S = ∂Gᵐ/∂yᵐ − yᵐ ∂ ln σ_F / ∂xᵐ`.
pub fn s_curvature(metric: &MetricField, at: &TangentSample) -> Result<f64> {
    let trace = spray(metric, at)?.trace();
    Ok(trace - log_density_derivative(metric, &at.x, &at.y)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{self, RiemannianModel};
    use approx::assert_relative_eq;

    #[test]
    fn euclidean_density_is_one() {
        for n in 2..=3 {
            let m = zoo::euclidean(n).unwrap();
            assert_relative_eq!(volume_density(&m, &vec![0.1; n]).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn riemannian_density_is_sqrt_det() {
        let a = vec![vec![2.0, 0.3, 0.0], vec![0.3, 1.0, 0.1], vec![0.0, 0.1, 0.5]];
        let det = 2.0 * (0.5 - 0.01) - 0.3 * (0.15);
        let m = zoo::riemannian(3, &RiemannianModel::Custom { matrix: a }).unwrap();
        assert_relative_eq!(volume_density(&m, &[0.0; 3]).unwrap(), f64::sqrt(det), max_relative = 1e-10);
    }

    #[test]
    fn log_gradient_matches_finite_differences() {
        let m = zoo::funk_ball_shifted(&[0.3, -0.1]).unwrap();
        let x = [0.2, 0.35];
        let g = log_density_gradient(&m, &x).unwrap();
        let h = 1e-5;
        for k in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            let fd = (volume_density(&m, &xp).unwrap().ln() - volume_density(&m, &xm).unwrap().ln()) / (2.0 * h);
            assert_relative_eq!(g[k], fd, max_relative = 1e-6, epsilon = 1e-8);
        }
    }

    #[test]
    fn sphere_s_curvature_vanishes() {
        let m = zoo::riemannian(2, &RiemannianModel::Sphere).unwrap();
        let at = m.sample(&[0.4, -0.7], &[1.0, 0.3]).unwrap();
        assert!(s_curvature(&m, &at).unwrap().abs() < 1e-9);
        assert!(distortion(&m, &at).unwrap().abs() < 1e-9);
    }
}
