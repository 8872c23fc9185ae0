//! Scalar-generic kernels. Each one seeds its own jet layer on top of whatever
//! scalar type the caller passes in, so the public operations obtain higher
//! derivatives simply by calling a kernel with jet-valued `x` and `y`.

use super::metric::{MetricField, MetricScalar};
use crate::error::{Error, Result};
use crate::jets::{Jet, Scalar};
use crate::linalg::{self, Matrix};

fn degenerate<S: Scalar>(x: &[S], y: &[S]) -> Error {
    Error::DegenerateMetric {
        x: x.iter().map(Scalar::re).collect(),
        y: y.iter().map(Scalar::re).collect(),
    }
}

fn check_finite<S: Scalar>(v: &Jet<S>, x: &[S], y: &[S]) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            x: x.iter().map(Scalar::re).collect(),
            y: y.iter().map(Scalar::re).collect(),
        })
    }
}

/// Seed `[x; y]` with one unit direction per coordinate: directions `0..n`
/// move `x`, directions `n..2n` move `y`.
fn seed_xy<S: Scalar>(x: &[S], y: &[S], order: usize) -> Result<(Vec<Jet<S>>, Vec<Jet<S>>)> {
    let n = x.len();
    let point: Vec<S> = x.iter().chain(y).cloned().collect();
    let dirs: Vec<Vec<f64>> = (0..2 * n)
        .map(|k| {
            let mut e = vec![0.0; 2 * n];
            e[k] = 1.0;
            e
        })
        .collect();
    let mut all = crate::jets::seed(&point, &dirs, order)?;
    let ys = all.split_off(n);
    Ok((all, ys))
}

fn seed_y<S: Scalar>(x: &[S], y: &[S], order: usize) -> Result<(Vec<Jet<S>>, Vec<Jet<S>>)> {
    let n = y.len();
    let dirs: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            e
        })
        .collect();
    let ys = crate::jets::seed(y, &dirs, order)?;
    let xs = x.iter().cloned().map(Jet::constant).collect();
    Ok((xs, ys))
}

/// Spray coefficients at `(x, y)` together with the fundamental tensor and its factor.
pub(crate) struct SprayKernel<S> {
    pub spray: Vec<S>,
    pub g: Matrix<S>,
}

/// `Gⁱ = ¼ gⁱˡ ([F²]_{xᵏyˡ} yᵏ − [F²]_{xˡ})`.
pub(crate) fn spray_kernel<S>(metric: &MetricField, x: &[S], y: &[S]) -> Result<SprayKernel<S>>
where
    S: Scalar,
    Jet<S>: MetricScalar,
{
    let n = x.len();
    let (xs, ys) = seed_xy(x, y, 2)?;
    let f = metric.eval(&xs, &ys);
    check_finite(&f, x, y)?;
    let f2 = f.square();
    let mut g: Matrix<S> = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = f2.d(&[n + i, n + j]) * 0.5;
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    let mut rhs = Vec::with_capacity(n);
    for l in 0..n {
        let mut acc = -f2.d(&[l]);
        for k in 0..n {
            acc.fma_assign(&y[k], &f2.d(&[k, n + l]));
        }
        rhs.push(acc);
    }
    let chol = linalg::cholesky(&g).ok_or_else(|| degenerate(x, y))?;
    let w = linalg::cholesky_solve(&chol, &rhs);
    let spray = w.into_iter().map(|v| v * 0.25).collect();
    Ok(SprayKernel { spray, g })
}

/// Mean Cartan torsion `I_i = ½ g^{jk} ∂g_{jk}/∂yⁱ` with the fundamental tensor.
pub(crate) struct CartanKernel<S> {
    pub cartan: Vec<S>,
    pub g: Matrix<S>,
    pub g_inverse: Matrix<S>,
}

pub(crate) fn cartan_kernel<S>(metric: &MetricField, x: &[S], y: &[S]) -> Result<CartanKernel<S>>
where
    S: Scalar,
    Jet<S>: MetricScalar,
{
    let n = x.len();
    let (xs, ys) = seed_y(x, y, 3)?;
    let f = metric.eval(&xs, &ys);
    check_finite(&f, x, y)?;
    let f2 = f.square();
    let mut g: Matrix<S> = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = f2.d(&[i, j]) * 0.5;
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    let chol = linalg::cholesky(&g).ok_or_else(|| degenerate(x, y))?;
    let g_inverse = linalg::spd_inverse(&chol);
    let mut cartan = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = S::zero();
        for j in 0..n {
            for k in 0..n {
                // ∂g_jk/∂yⁱ = ½ [F²]_{yⁱyʲyᵏ}
                acc.fma_assign(&g_inverse[j][k], &f2.d(&[i, j, k]));
            }
        }
        cartan.push(acc * 0.25);
    }
    Ok(CartanKernel {
        cartan,
        g,
        g_inverse,
    })
}

/// `g_ij = ½ [F²]_{yⁱyʲ}` only.
pub(crate) fn fundamental_kernel<S>(metric: &MetricField, x: &[S], y: &[S]) -> Result<Matrix<S>>
where
    S: Scalar,
    Jet<S>: MetricScalar,
{
    let n = x.len();
    let (xs, ys) = seed_y(x, y, 2)?;
    let f = metric.eval(&xs, &ys);
    check_finite(&f, x, y)?;
    let f2 = f.square();
    let mut g: Matrix<S> = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = f2.d(&[i, j]) * 0.5;
            g[i][j] = v.clone();
            g[j][i] = v;
        }
    }
    Ok(g)
}
