//! Forward-mode differentiation by truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] carries a value together with every Taylor coefficient, up to a
//! fixed total order, of a function along a set of seeded directions. Jets
//! nest: `Jet<Jet<f64>>` differentiates in two independent sets of directions,
//! which is how fourth-order mixed derivatives of `F²` are obtained for the
//! Riemann curvature without finite differences.
//!
//! Code that should run on plain numbers and on jets alike is written against
//! the [`Scalar`] trait.

mod jet;
pub mod layout;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub use jet::{extract, seed, Jet};
pub use layout::{Layout, MAX_DIRECTIONS, MAX_ORDER};

/// First-level jet over reals.
pub type Jet1 = Jet<f64>;
/// Jet whose coefficients are themselves jets.
pub type Jet2 = Jet<Jet<f64>>;

/// Arithmetic shared by `f64` and jets of any nesting depth.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(v: f64) -> Self;

    /// The underlying real value with every infinitesimal part dropped.
    fn re(&self) -> f64;

    /// Sum of truncation orders over all nesting levels.
    fn total_order(&self) -> usize;

    /// `self += a * b` without intermediate allocation where possible.
    fn fma_assign(&mut self, a: &Self, b: &Self);

    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn recip(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn square(&self) -> Self {
        let mut out = Self::zero();
        out.fma_assign(self, self);
        out
    }

    fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                result = result * base.clone();
            }
            k >>= 1;
            if k > 0 {
                base = base.square();
            }
        }
        result
    }

    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn total_order(&self) -> usize {
        0
    }
    fn fma_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Euclidean inner product of two slices of scalars.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (u, v) in a.iter().zip(b) {
        acc.fma_assign(u, v);
    }
    acc
}

/// Inner product with a constant real vector.
pub fn dot_f64<S: Scalar>(a: &[f64], b: &[S]) -> S {
    let mut acc = S::zero();
    for (u, v) in a.iter().zip(b) {
        acc += v.clone() * *u;
    }
    acc
}

/// Lift a real vector to constant scalars.
pub fn lift<S: Scalar>(v: &[f64]) -> Vec<S> {
    v.iter().map(|&x| S::from_f64(x)).collect()
}
