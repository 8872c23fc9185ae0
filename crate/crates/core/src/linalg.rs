//! Small dense linear algebra over [`Scalar`], so the same routines solve
//! systems whose entries are jets.

use crate::jets::Scalar;

/// Dense square matrix stored row-major as nested vectors.
pub type Matrix<S> = Vec<Vec<S>>;

/// Lower-triangular Cholesky factor of a symmetric matrix, or `None` when a
/// pivot is not positive relative to the diagonal scale.
pub fn cholesky<S: Scalar>(a: &Matrix<S>) -> Option<Matrix<S>> {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i].re().abs()).fold(0.0, f64::max);
    if !(scale.is_finite() && scale > 0.0) {
        return None;
    }
    let mut l: Matrix<S> = vec![vec![S::zero(); n]; n];
    for j in 0..n {
        let mut d = a[j][j].clone();
        for k in 0..j {
            d -= l[j][k].square();
        }
        if !(d.re() > 1e-14 * scale) || !d.re().is_finite() {
            return None;
        }
        let root = d.sqrt();
        let inv = root.recip();
        for i in (j + 1)..n {
            let mut s = a[i][j].clone();
            for k in 0..j {
                let p = l[i][k].clone() * l[j][k].clone();
                s -= p;
            }
            l[i][j] = s * inv.clone();
        }
        l[j][j] = root;
    }
    Some(l)
}

/// Solve `L Lᵀ x = b` given the Cholesky factor `L`.
pub fn cholesky_solve<S: Scalar>(l: &Matrix<S>, b: &[S]) -> Vec<S> {
    let n = l.len();
    let mut z: Vec<S> = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = b[i].clone();
        for k in 0..i {
            let p = l[i][k].clone() * z[k].clone();
            s -= p;
        }
        z.push(s / l[i][i].clone());
    }
    let mut x = z;
    for i in (0..n).rev() {
        let mut s = x[i].clone();
        for k in (i + 1)..n {
            let p = l[k][i].clone() * x[k].clone();
            s -= p;
        }
        x[i] = s / l[i][i].clone();
    }
    x
}

/// Inverse of an SPD matrix through its Cholesky factor.
pub fn spd_inverse<S: Scalar>(l: &Matrix<S>) -> Matrix<S> {
    let n = l.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![S::zero(); n];
        e[j] = S::one();
        cols.push(cholesky_solve(l, &e));
    }
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect()
}

pub fn mat_vec<S: Scalar>(a: &Matrix<S>, v: &[S]) -> Vec<S> {
    a.iter().map(|row| crate::jets::dot(row, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_spd_system() {
        let a = vec![
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ];
        let l = cholesky(&a).unwrap();
        let x = cholesky_solve(&l, &[1.0, 2.0, 3.0]);
        let back = mat_vec(&a, &x);
        for (b, want) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert_relative_eq!(*b, want, epsilon = 1e-14);
        }
        let inv = spd_inverse(&l);
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| a[i][k] * inv[k][j]).sum();
                assert_relative_eq!(s, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(cholesky(&a).is_none());
    }
}
