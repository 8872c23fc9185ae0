use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::ptr;

use super::layout::{self, Layout};
use super::Scalar;
use crate::error::{Error, Result};

/// Truncated Taylor polynomial in the seeded directions.
///
/// `coeffs[i]` is the raw Taylor coefficient of the monomial `layout.exponents(i)`;
/// use [`Jet::derivative`] for factorial-normalized partial derivatives. A jet
/// with the trivial layout is a constant and combines with any other layout.
#[derive(Clone)]
pub struct Jet<T = f64> {
    layout: &'static Layout,
    coeffs: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Jet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("directions", &self.layout.directions())
            .field("order", &self.layout.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<T: Scalar> Jet<T> {
    pub fn constant(value: T) -> Self {
        Jet {
            layout: layout::trivial(),
            coeffs: vec![value],
        }
    }

    /// `value + Σ_d direction[d] ε_d`.
    pub fn variable(value: T, direction: &[f64], layout: &'static Layout) -> Self {
        let mut coeffs = vec![T::zero(); layout.len()];
        coeffs[0] = value;
        if layout.order() > 0 {
            for (d, &w) in direction.iter().enumerate() {
                if w != 0.0 {
                    let mut e = vec![0u8; layout.directions()];
                    e[d] = 1;
                    let i = layout.index_of_exponents(&e).expect("first-order monomial");
                    coeffs[i] = T::from_f64(w);
                }
            }
        }
        Jet { layout, coeffs }
    }

    pub fn layout(&self) -> &'static Layout {
        self.layout
    }

    pub fn value(&self) -> &T {
        &self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn num_directions(&self) -> usize {
        self.layout.directions()
    }

    pub fn order(&self) -> usize {
        self.layout.order()
    }

    /// Raw Taylor coefficient for the listed directions.
    pub fn taylor(&self, dirs: &[usize]) -> Result<T> {
        if self.layout.is_trivial() {
            return if dirs.is_empty() {
                Ok(self.coeffs[0].clone())
            } else {
                Ok(T::zero())
            };
        }
        let i = self.layout.index_of(dirs)?;
        Ok(self.coeffs[i].clone())
    }

    /// Mixed partial derivative along the listed directions (repetition allowed).
    pub fn derivative(&self, dirs: &[usize]) -> Result<T> {
        if self.layout.is_trivial() {
            return self.taylor(dirs);
        }
        let i = self.layout.index_of(dirs)?;
        Ok(self.coeffs[i].clone() * self.layout.factorial(i))
    }

    /// Like [`Jet::derivative`] but panics on a malformed request.
    pub(crate) fn d(&self, dirs: &[usize]) -> T {
        self.derivative(dirs).expect("derivative index within layout")
    }

    fn promote(&mut self, target: &'static Layout) {
        if ptr::eq(self.layout, target) {
            return;
        }
        assert!(
            self.layout.is_trivial(),
            "mixing jets with incompatible layouts ({}x{} vs {}x{})",
            self.layout.directions(),
            self.layout.order(),
            target.directions(),
            target.order()
        );
        let value = std::mem::replace(&mut self.coeffs[0], T::zero());
        let mut coeffs = vec![T::zero(); target.len()];
        coeffs[0] = value;
        self.coeffs = coeffs;
        self.layout = target;
    }

    fn infinitesimal(&self) -> Jet<T> {
        let mut d = self.clone();
        d.coeffs[0] = T::zero();
        d
    }

    /// `f(self)` from the Taylor coefficients `f^(m)(a0)/m!`, `m = 0..=order`,
    /// produced by `coefficients(a0, order)`.
    fn compose(&self, coefficients: impl FnOnce(&T, usize) -> Vec<T>) -> Jet<T> {
        let order = self.layout.order();
        let c = coefficients(&self.coeffs[0], order);
        debug_assert_eq!(c.len(), order + 1);
        if order == 0 {
            return Jet {
                layout: self.layout,
                coeffs: vec![c[0].clone()],
            };
        }
        let delta = self.infinitesimal();
        let mut result = Jet::constant(c[order].clone());
        for m in (0..order).rev() {
            result = &result * &delta;
            result.coeffs[0] += c[m].clone();
        }
        result
    }

    fn map(&self, f: impl Fn(&T) -> T) -> Jet<T> {
        Jet {
            layout: self.layout,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

fn add_jets<T: Scalar>(a: &Jet<T>, b: &Jet<T>, sign: f64) -> Jet<T> {
    if b.layout.is_trivial() {
        let mut out = a.clone();
        out.coeffs[0] += b.coeffs[0].clone() * sign;
        return out;
    }
    let mut out = if sign > 0.0 { b.clone() } else { -b };
    if a.layout.is_trivial() {
        out.coeffs[0] += a.coeffs[0].clone();
        return out;
    }
    assert!(ptr::eq(a.layout, b.layout), "mixing jets with incompatible layouts");
    for (o, x) in out.coeffs.iter_mut().zip(&a.coeffs) {
        *o += x.clone();
    }
    out
}

fn mul_jets<T: Scalar>(a: &Jet<T>, b: &Jet<T>) -> Jet<T> {
    if a.layout.is_trivial() {
        let s = &a.coeffs[0];
        return b.map(|x| {
            let mut o = T::zero();
            o.fma_assign(s, x);
            o
        });
    }
    if b.layout.is_trivial() {
        let s = &b.coeffs[0];
        return a.map(|x| {
            let mut o = T::zero();
            o.fma_assign(x, s);
            o
        });
    }
    assert!(ptr::eq(a.layout, b.layout), "mixing jets with incompatible layouts");
    let mut out = vec![T::zero(); a.layout.len()];
    for &(i, j, t) in a.layout.products() {
        out[t as usize].fma_assign(&a.coeffs[i as usize], &b.coeffs[j as usize]);
    }
    Jet {
        layout: a.layout,
        coeffs: out,
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    fn from_f64(v: f64) -> Self {
        Jet::constant(T::from_f64(v))
    }

    fn re(&self) -> f64 {
        self.coeffs[0].re()
    }

    fn total_order(&self) -> usize {
        self.layout.order() + self.coeffs[0].total_order()
    }

    fn fma_assign(&mut self, a: &Self, b: &Self) {
        match (a.layout.is_trivial(), b.layout.is_trivial()) {
            (true, true) => {
                self.coeffs[0].fma_assign(&a.coeffs[0], &b.coeffs[0]);
            }
            (true, false) => {
                self.promote(b.layout);
                let s = &a.coeffs[0];
                for (o, x) in self.coeffs.iter_mut().zip(&b.coeffs) {
                    o.fma_assign(s, x);
                }
            }
            (false, true) => {
                self.promote(a.layout);
                let s = &b.coeffs[0];
                for (o, x) in self.coeffs.iter_mut().zip(&a.coeffs) {
                    o.fma_assign(x, s);
                }
            }
            (false, false) => {
                assert!(ptr::eq(a.layout, b.layout), "mixing jets with incompatible layouts");
                self.promote(a.layout);
                for &(i, j, t) in a.layout.products() {
                    self.coeffs[t as usize]
                        .fma_assign(&a.coeffs[i as usize], &b.coeffs[j as usize]);
                }
            }
        }
    }

    fn sqrt(&self) -> Self {
        self.compose(|a0, k| {
            let s = a0.sqrt();
            let inv = a0.recip();
            let mut c = Vec::with_capacity(k + 1);
            c.push(s);
            for m in 1..=k {
                let f = (0.5 - (m as f64 - 1.0)) / m as f64;
                let next = c[m - 1].clone() * inv.clone() * f;
                c.push(next);
            }
            c
        })
    }

    fn exp(&self) -> Self {
        self.compose(|a0, k| {
            let e = a0.exp();
            let mut c = Vec::with_capacity(k + 1);
            c.push(e);
            for m in 1..=k {
                let next = c[m - 1].clone() / m as f64;
                c.push(next);
            }
            c
        })
    }

    fn ln(&self) -> Self {
        self.compose(|a0, k| {
            let inv = a0.recip();
            let mut c = Vec::with_capacity(k + 1);
            c.push(a0.ln());
            let mut p = T::one();
            for m in 1..=k {
                p = p * inv.clone();
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                c.push(p.clone() * (sign / m as f64));
            }
            c
        })
    }

    fn recip(&self) -> Self {
        self.compose(|a0, k| {
            let inv = a0.recip();
            let mut c = Vec::with_capacity(k + 1);
            c.push(inv.clone());
            for m in 1..=k {
                let next = -(c[m - 1].clone() * inv.clone());
                c.push(next);
            }
            c
        })
    }

    fn powf(&self, p: f64) -> Self {
        self.compose(|a0, k| {
            let inv = a0.recip();
            let mut c = Vec::with_capacity(k + 1);
            c.push(a0.powf(p));
            for m in 1..=k {
                let f = (p - (m as f64 - 1.0)) / m as f64;
                let next = c[m - 1].clone() * inv.clone() * f;
                c.push(next);
            }
            c
        })
    }

    fn sin(&self) -> Self {
        self.compose(|a0, k| trig_coefficients(a0.sin(), a0.cos(), k))
    }

    fn cos(&self) -> Self {
        self.compose(|a0, k| trig_coefficients(a0.cos(), -a0.sin(), k))
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_finite)
    }
}

/// Taylor coefficients of a function whose derivatives cycle `f, f', -f, -f'`.
fn trig_coefficients<T: Scalar>(f: T, df: T, k: usize) -> Vec<T> {
    let cycle = [f.clone(), df.clone(), -f, -df];
    let mut fact = 1.0;
    (0..=k)
        .map(|m| {
            if m > 0 {
                fact *= m as f64;
            }
            cycle[m % 4].clone() / fact
        })
        .collect()
}

impl<'a, T: Scalar> Add<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &'a Jet<T>) -> Jet<T> {
        add_jets(self, rhs, 1.0)
    }
}

impl<'a, T: Scalar> Sub<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &'a Jet<T>) -> Jet<T> {
        add_jets(self, rhs, -1.0)
    }
}

impl<'a, T: Scalar> Mul<&'a Jet<T>> for &'a Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &'a Jet<T>) -> Jet<T> {
        mul_jets(self, rhs)
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(mut self) -> Jet<T> {
        for c in self.coeffs.iter_mut() {
            *c = -std::mem::replace(c, T::zero());
        }
        self
    }
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Jet<T>) -> Jet<T> {
        add_jets(&self, &rhs, 1.0)
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: Jet<T>) -> Jet<T> {
        add_jets(&self, &rhs, -1.0)
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Jet<T>) -> Jet<T> {
        mul_jets(&self, &rhs)
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Jet<T>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet<T>) -> Jet<T> {
        if rhs.layout.is_trivial() {
            let inv = rhs.coeffs[0].recip();
            return self.map(|x| x.clone() * inv.clone());
        }
        mul_jets(&self, &rhs.recip())
    }
}

impl<T: Scalar> Add<f64> for Jet<T> {
    type Output = Jet<T>;
    fn add(mut self, rhs: f64) -> Jet<T> {
        self.coeffs[0] += T::from_f64(rhs);
        self
    }
}

impl<T: Scalar> Sub<f64> for Jet<T> {
    type Output = Jet<T>;
    fn sub(mut self, rhs: f64) -> Jet<T> {
        self.coeffs[0] -= T::from_f64(rhs);
        self
    }
}

impl<T: Scalar> Mul<f64> for Jet<T> {
    type Output = Jet<T>;
    fn mul(mut self, rhs: f64) -> Jet<T> {
        for c in self.coeffs.iter_mut() {
            *c *= T::from_f64(rhs);
        }
        self
    }
}

impl<T: Scalar> Div<f64> for Jet<T> {
    type Output = Jet<T>;
    fn div(self, rhs: f64) -> Jet<T> {
        self * (1.0 / rhs)
    }
}

impl<T: Scalar> AddAssign for Jet<T> {
    fn add_assign(&mut self, rhs: Jet<T>) {
        if rhs.layout.is_trivial() {
            self.coeffs[0] += rhs.coeffs[0].clone();
            return;
        }
        self.promote(rhs.layout);
        for (o, x) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *o += x;
        }
    }
}

impl<T: Scalar> SubAssign for Jet<T> {
    fn sub_assign(&mut self, rhs: Jet<T>) {
        *self += -rhs;
    }
}

impl<T: Scalar> MulAssign for Jet<T> {
    fn mul_assign(&mut self, rhs: Jet<T>) {
        *self = mul_jets(self, &rhs);
    }
}

/// Seed jet coordinates at `point`.
///
/// Coordinate `i` becomes `point[i] + Σ_d directions[d][i] ε_d`, truncated at
/// total `order`. Evaluating a function on the result yields its Taylor
/// expansion along the multi-curve spanned by the directions. With no
/// directions the jets are plain constants.
pub fn seed<T: Scalar>(point: &[T], directions: &[Vec<f64>], order: usize) -> Result<Vec<Jet<T>>> {
    if order > layout::MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    for d in directions {
        if d.len() != point.len() {
            return Err(Error::Dimension {
                expected: point.len(),
                got: d.len(),
            });
        }
    }
    let layout = layout::layout(directions.len(), order)?;
    Ok(point
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let dir: Vec<f64> = directions.iter().map(|d| d[i]).collect();
            Jet::variable(p.clone(), &dir, layout)
        })
        .collect())
}

/// Mixed partial derivative of `jet` along the listed seeded directions.
pub fn extract<T: Scalar>(jet: &Jet<T>, multi_index: &[usize]) -> Result<T> {
    if multi_index.len() > jet.order() {
        return Err(Error::OutOfOrder {
            index: multi_index.to_vec(),
            order: jet.order(),
        });
    }
    jet.derivative(multi_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::dot;
    use approx::assert_relative_eq;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn euclidean_norm_gradient() {
        let y = seed(&[3.0, 4.0], &[e(2, 0)], 1).unwrap();
        let f = dot(&y, &y).sqrt();
        assert_relative_eq!(f.value().re(), 5.0, epsilon = 1e-15);
        assert_relative_eq!(extract(&f, &[0]).unwrap(), 0.6, epsilon = 1e-15);
    }

    #[test]
    fn zero_directions_are_plain_arithmetic() {
        let x = seed(&[0.7, -0.2], &[], 0).unwrap();
        let f = (x[0].clone() * x[1].clone()).exp() + x[0].clone().sqrt();
        assert_eq!(f.coeffs().len(), 1);
        let plain = (0.7f64 * -0.2).exp() + 0.7f64.sqrt();
        assert_eq!(f.value().re(), plain);
    }

    #[test]
    fn exp_taylor_coefficients() {
        let t = seed(&[1.0], &[e(1, 0)], 3).unwrap();
        let f = t[0].exp();
        let ee = std::f64::consts::E;
        for (k, want) in [ee, ee, ee / 2.0, ee / 6.0].iter().enumerate() {
            let dirs = vec![0; k];
            assert_relative_eq!(f.taylor(&dirs).unwrap(), *want, max_relative = 1e-15);
        }
    }

    #[test]
    fn bilinear_mixed_partial() {
        let y = seed(&[2.0, 3.0], &[e(2, 0), e(2, 1)], 2).unwrap();
        let f = y[0].clone() * y[1].clone();
        assert_eq!(extract(&f, &[0, 1]).unwrap(), 1.0);
        assert_eq!(extract(&f, &[0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn half_square_norm_has_identity_hessian() {
        let n = 4;
        let dirs: Vec<Vec<f64>> = (0..n).map(|i| e(n, i)).collect();
        let y = seed(&[0.3, -1.2, 2.0, 0.5], &dirs, 2).unwrap();
        let f = dot(&y, &y) * 0.5;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(extract(&f, &[i, j]).unwrap(), want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn extract_rejects_excess_order() {
        let y = seed(&[1.0], &[e(1, 0)], 2).unwrap();
        assert!(matches!(
            extract(&y[0], &[0, 0, 0]),
            Err(Error::OutOfOrder { .. })
        ));
        assert!(matches!(
            seed(&[1.0], &[e(1, 0)], 5),
            Err(Error::UnsupportedOrder(5))
        ));
    }

    #[test]
    fn nested_jets_give_mixed_fourth_derivatives() {
        // f(a, b) = a^2 b^2 exp(a): ∂a∂a∂b∂b f = 2 * d²/da²(a² e^a) = 2 e^a (a² + 4a + 2)
        let outer = seed(&[0.4, 1.3], &[e(2, 0), e(2, 1)], 2).unwrap();
        let inner = seed(&outer, &[e(2, 0), e(2, 1)], 2).unwrap();
        let (a, b) = (inner[0].clone(), inner[1].clone());
        let f = a.clone() * a.clone() * b.clone() * b * a.exp();
        let d = f.derivative(&[0, 1]).unwrap().derivative(&[0, 1]).unwrap();
        // inner ∂a∂b of f = 4 a b e^a + 2 a² b e^a; outer ∂a∂b of that
        let av: f64 = 0.4;
        let want = 4.0 * av.exp() * (1.0 + av) + 2.0 * av.exp() * (2.0 * av + av * av);
        assert_relative_eq!(d, want, max_relative = 1e-13);
        assert_eq!(f.total_order(), 4);
    }

    #[test]
    fn recip_sqrt_ln_powf_agree_with_closed_forms() {
        let t = seed(&[2.0], &[e(1, 0)], 4).unwrap();
        let x = &t[0];
        // d^k/dx^k of 1/x at 2: (-1)^k k! / 2^(k+1)
        let r = x.recip();
        let mut fact = 1.0;
        for k in 0..=4usize {
            if k > 0 {
                fact *= k as f64;
            }
            let want = (-1f64).powi(k as i32) * fact / 2f64.powi(k as i32 + 1);
            assert_relative_eq!(r.derivative(&vec![0; k]).unwrap(), want, max_relative = 1e-14);
        }
        let s = x.sqrt();
        assert_relative_eq!(s.derivative(&[0, 0]).unwrap(), -0.25 * 2f64.powf(-1.5), max_relative = 1e-14);
        let l = x.ln();
        assert_relative_eq!(l.derivative(&[0, 0, 0]).unwrap(), 2.0 / 8.0, max_relative = 1e-14);
        let p = x.powf(1.5);
        assert_relative_eq!(p.derivative(&[0, 0]).unwrap(), 0.75 * 2f64.powf(-0.5), max_relative = 1e-14);
        let q = x.powi(-2);
        assert_relative_eq!(q.derivative(&[0]).unwrap(), -2.0 / 8.0, max_relative = 1e-14);
        let c = x.cos();
        assert_relative_eq!(c.derivative(&[0, 0, 0]).unwrap(), 2f64.sin(), max_relative = 1e-14);
    }
}
