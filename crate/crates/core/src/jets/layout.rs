//! Graded multi-index layouts shared by every jet of a given shape.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 4;
pub const MAX_DIRECTIONS: usize = 8;

/// Dense coefficient layout for truncated Taylor polynomials in `directions`
/// variables up to total degree `order`.
///
/// Monomials are stored graded (by total degree, then lexicographically), so
/// index 0 is always the value. The multiplication table lists every pair of
/// monomials whose product survives truncation.
#[derive(Debug)]
pub struct Layout {
    directions: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    degrees: Vec<u8>,
    factorials: Vec<f64>,
    products: Vec<(u32, u32, u32)>,
    index: HashMap<Vec<u8>, usize>,
}

impl Layout {
    fn build(directions: usize, order: usize) -> Layout {
        let mut exponents = Vec::new();
        for degree in 0..=order {
            let mut current = vec![0u8; directions];
            push_degree(&mut exponents, &mut current, 0, degree);
        }
        let index: HashMap<Vec<u8>, usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        let degrees: Vec<u8> = exponents.iter().map(|e| e.iter().sum()).collect();
        let factorials = exponents
            .iter()
            .map(|e| e.iter().map(|&k| factorial(k as usize)).product())
            .collect();
        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            for (j, b) in exponents.iter().enumerate() {
                if (degrees[i] + degrees[j]) as usize > order {
                    continue;
                }
                let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        Layout {
            directions,
            order,
            exponents,
            degrees,
            factorials,
            products,
            index,
        }
    }

    pub fn directions(&self) -> usize {
        self.directions
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.len() == 1
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exponents[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i] as usize
    }

    /// `α!` for the monomial at `i`; converts Taylor coefficients to partial derivatives.
    pub fn factorial(&self, i: usize) -> f64 {
        self.factorials[i]
    }

    pub(crate) fn products(&self) -> &[(u32, u32, u32)] {
        &self.products
    }

    pub fn index_of_exponents(&self, exponents: &[u8]) -> Option<usize> {
        self.index.get(exponents).copied()
    }

    /// Index of the monomial obtained by differentiating once along each listed
    /// direction (repetitions allowed).
    pub fn index_of(&self, dirs: &[usize]) -> Result<usize> {
        if dirs.len() > self.order {
            return Err(Error::OutOfOrder {
                index: dirs.to_vec(),
                order: self.order,
            });
        }
        let mut e = vec![0u8; self.directions];
        for &d in dirs {
            if d >= self.directions {
                return Err(Error::BadDirection {
                    index: d,
                    directions: self.directions,
                });
            }
            e[d] += 1;
        }
        Ok(self.index[&e])
    }
}

fn push_degree(out: &mut Vec<Vec<u8>>, current: &mut Vec<u8>, pos: usize, remaining: usize) {
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if pos == current.len() - 1 {
        current[pos] = remaining as u8;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k as u8;
        push_degree(out, current, pos + 1, remaining - k);
    }
    current[pos] = 0;
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

type Cache = Mutex<HashMap<(usize, usize), &'static Layout>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared layout for `directions` variables truncated at `order`.
pub fn layout(directions: usize, order: usize) -> Result<&'static Layout> {
    if order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    if directions > MAX_DIRECTIONS {
        return Err(Error::TooManyDirections(directions));
    }
    let (directions, order) = if directions == 0 || order == 0 {
        (0, 0)
    } else {
        (directions, order)
    };
    let mut map = cache().lock().expect("layout cache poisoned");
    Ok(*map
        .entry((directions, order))
        .or_insert_with(|| Box::leak(Box::new(Layout::build(directions, order)))))
}

/// The zero-direction layout: a jet that is just a value.
pub fn trivial() -> &'static Layout {
    static TRIVIAL: OnceLock<&'static Layout> = OnceLock::new();
    TRIVIAL.get_or_init(|| layout(0, 0).expect("trivial layout"))
}
