use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kernels::{self, CartanKernel, SprayKernel};
use super::metric::{MetricField, TangentSample};
use super::tensor::to_dmatrix;
use crate::error::Result;
use crate::jets::{layout, Jet, Jet1};

/// A torsion covector (`I_i` or `J_i`) with its index raised by `g^{ij}(x, y)`.
#[derive(Debug, Clone)]
pub struct TorsionVector {
    pub covariant: DVector<f64>,
    pub contravariant: DVector<f64>,
    pub at: TangentSample,
}

impl TorsionVector {
    /// `√(T_i g^{ij} T_j)`.
    pub fn norm(&self) -> f64 {
        self.covariant.dot(&self.contravariant).max(0.0).sqrt()
    }

    /// `T_i yⁱ`; vanishes for both torsions.
    pub fn contract_y(&self) -> f64 {
        self.covariant.dot(&DVector::from_row_slice(&self.at.y))
    }
}

/// Mean Cartan torsion `I_i = ½ g^{jk} ∂g_jk/∂yⁱ`, from third `y`-derivatives of
/// `F²` (no volume form involved).
pub fn mean_cartan(metric: &MetricField, at: &TangentSample) -> Result<TorsionVector> {
    let CartanKernel {
        cartan, g_inverse, ..
    } = kernels::cartan_kernel::<f64>(metric, &at.x, &at.y)?;
    let covariant = DVector::from_vec(cartan);
    let contravariant = to_dmatrix(&g_inverse) * &covariant;
    Ok(TorsionVector {
        covariant,
        contravariant,
        at: at.clone(),
    })
}

/// Pointwise torsion data along one direction: `I`, `J`, the spray and the
/// nonlinear connection, computed from a single jet evaluation.
#[derive(Debug, Clone)]
pub struct TorsionBundle {
    pub cartan: TorsionVector,
    pub landsberg: TorsionVector,
    pub spray: DVector<f64>,
    pub connection: DMatrix<f64>,
    pub g: DMatrix<f64>,
}

pub fn torsion_bundle(metric: &MetricField, at: &TangentSample) -> Result<TorsionBundle> {
    let n = metric.dimension();
    // direction 0 moves x along y; directions 1..=n move y along the axes
    let lay = layout::layout(n + 1, 1)?;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let mut dx = vec![0.0; n + 1];
        dx[0] = at.y[i];
        xs.push(Jet::variable(at.x[i], &dx, lay));
        let mut dy = vec![0.0; n + 1];
        dy[1 + i] = 1.0;
        ys.push(Jet::variable(at.y[i], &dy, lay));
    }
    let SprayKernel { spray, .. } = kernels::spray_kernel::<Jet1>(metric, &xs, &ys)?;
    let CartanKernel {
        cartan,
        g,
        g_inverse,
    } = kernels::cartan_kernel::<Jet1>(metric, &xs, &ys)?;

    let g_spray = DVector::from_iterator(n, spray.iter().map(|s| *s.value()));
    let connection = DMatrix::from_fn(n, n, |k, i| spray[k].d(&[1 + i]));
    let ginv = DMatrix::from_fn(n, n, |i, j| *g_inverse[i][j].value());
    let g = DMatrix::from_fn(n, n, |i, j| *g[i][j].value());
    let i_cov = DVector::from_iterator(n, cartan.iter().map(|c| *c.value()));

    // J_i = yᵐ∂I_i/∂xᵐ − 2Gʲ ∂I_i/∂yʲ − I_k Nᵏ_i
    let j_cov = DVector::from_fn(n, |i, _| {
        let mut v = cartan[i].d(&[0]);
        for j in 0..n {
            v -= 2.0 * g_spray[j] * cartan[i].d(&[1 + j]);
        }
        for k in 0..n {
            v -= i_cov[k] * connection[(k, i)];
        }
        v
    });
    let i_con = &ginv * &i_cov;
    let j_con = &ginv * &j_cov;
    Ok(TorsionBundle {
        cartan: TorsionVector {
            covariant: i_cov,
            contravariant: i_con,
            at: at.clone(),
        },
        landsberg: TorsionVector {
            covariant: j_cov,
            contravariant: j_con,
            at: at.clone(),
        },
        spray: g_spray,
        connection,
        g,
    })
}

/// Mean Landsberg curvature `J_i = I_{i|m} yᵐ`, the horizontal derivative of `I`
/// along `y` taken through the nonlinear connection.
pub fn mean_landsberg(metric: &MetricField, at: &TangentSample) -> Result<TorsionVector> {
    Ok(torsion_bundle(metric, at)?.landsberg)
}

/// `‖𝐈‖_x` with the direction attaining it.
#[derive(Debug, Clone)]
pub struct CartanNorm {
    pub value: f64,
    pub direction: Vec<f64>,
}

fn cartan_length(metric: &MetricField, x: &[f64], y: &[f64]) -> Result<f64> {
    let k = kernels::cartan_kernel::<f64>(metric, x, y)?;
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += k.cartan[i] * k.g_inverse[i][j] * k.cartan[j];
        }
    }
    Ok(s.max(0.0).sqrt() * metric.value(x, y))
}

/// Unit directions covering `S^{n-1}` for the coarse search.
pub fn sphere_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    match n {
        2 => (0..count)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci lattice
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| crate::verify::sampling::uniform_sphere(&mut rng, n))
                .collect()
        }
    }
}

fn normalize(v: &mut [f64]) {
    let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= len);
}

/// `‖𝐈‖_x = sup_y F(x, y)√(I_i g^{ij} I_j)`, the supremum of `√(I_i g^{ij} I_j)`
/// over the indicatrix `F(x, y) = 1`: coarse sphere sampling followed by a
/// pattern-search ascent on the sphere from the best few candidates.
pub fn cartan_norm(metric: &MetricField, x: &[f64]) -> Result<CartanNorm> {
    let n = metric.dimension();
    let count = match n {
        2 => 96,
        3 => 300,
        _ => 600,
    };
    let mut scored = Vec::with_capacity(count);
    for d in sphere_directions(n, count, 0x5eed) {
        let v = cartan_length(metric, x, &d)?;
        scored.push((v, d));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = CartanNorm {
        value: scored[0].0,
        direction: scored[0].1.clone(),
    };
    for (v0, d0) in scored.into_iter().take(3) {
        let (v, d) = ascend(metric, x, v0, d0)?;
        if v > best.value {
            best = CartanNorm {
                value: v,
                direction: d,
            };
        }
    }
    Ok(best)
}

fn ascend(metric: &MetricField, x: &[f64], mut value: f64, mut dir: Vec<f64>) -> Result<(f64, Vec<f64>)> {
    let n = dir.len();
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for k in 0..n {
            for sign in [1.0, -1.0] {
                let mut cand = dir.clone();
                cand[k] += sign * step;
                normalize(&mut cand);
                let v = cartan_length(metric, x, &cand)?;
                if v > value {
                    value = v;
                    dir = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok((value, dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{self, RiemannianModel};

    #[test]
    fn riemannian_torsions_vanish() {
        let m = zoo::riemannian(3, &RiemannianModel::Sphere).unwrap();
        let at = m.sample(&[0.2, 0.5, -0.1], &[1.0, -0.4, 0.3]).unwrap();
        let b = torsion_bundle(&m, &at).unwrap();
        assert!(b.cartan.covariant.amax() < 1e-12);
        assert!(b.landsberg.covariant.amax() < 1e-10);
        assert!(cartan_norm(&m, &[0.1, 0.0, 0.3]).unwrap().value < 1e-10);
    }

    #[test]
    fn torsions_are_orthogonal_to_y() {
        let m = zoo::funk_ball_shifted(&[0.3, 0.0, 0.1]).unwrap();
        let at = m.sample(&[0.2, -0.3, 0.4], &[0.5, 1.0, -0.2]).unwrap();
        let b = torsion_bundle(&m, &at).unwrap();
        assert!(b.cartan.contract_y().abs() < 1e-12 * b.cartan.covariant.norm().max(1.0));
        assert!(b.landsberg.contract_y().abs() < 1e-10 * b.landsberg.covariant.norm().max(1.0));
        assert!(b.cartan.norm() > 1e-3);
    }
}
