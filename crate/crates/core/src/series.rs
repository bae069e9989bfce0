//! Truncated multivariate power series in holomorphic parameters
//! `t = (t_1, …, t_m)` with coefficients in a complex vector space.
//!
//! Truncation is by total degree: a series of order `N` never stores a term
//! of total degree above `N`, and absent terms are zero. There is no way to
//! represent `t̄`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use crate::error::Error;
use crate::field::C64;

/// Coefficient spaces a series can carry.
pub trait Coefficient: Clone {
    /// Zero of the same shape as `self`.
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, c: C64) -> Self;
    /// Largest entry modulus.
    fn max_norm(&self) -> f64;
}

impl Coefficient for DVector<C64> {
    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn max_norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Coefficient for DMatrix<C64> {
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn max_norm(&self) -> f64 {
        self.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Coefficient for C64 {
    fn zero_like(&self) -> Self {
        C64::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn max_norm(&self) -> f64 {
        self.norm()
    }
}

/// Exponent multi-index `(e_1, …, e_m)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(vars: usize) -> Self {
        Self(vec![0; vars])
    }

    pub fn unit(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Self(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn vars(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when componentwise nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// `t^e` at a point.
    pub fn monomial_value(&self, t: &[C64]) -> C64 {
        self.0
            .iter()
            .zip(t)
            .fold(C64::one(), |acc, (&e, &x)| acc * x.powu(e))
    }

    /// All exponents in `vars` variables of total degree exactly `degree`,
    /// in lexicographic order.
    pub fn all_of_degree(vars: usize, degree: usize) -> Vec<Exponent> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; vars];
        fn rec(i: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
            if i + 1 == cur.len() {
                cur[i] = left as u32;
                out.push(Exponent(cur.clone()));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e as u32;
                rec(i + 1, left - e, cur, out);
            }
        }
        if vars == 0 {
            if degree == 0 {
                out.push(Exponent(Vec::new()));
            }
            return out;
        }
        rec(0, degree, &mut cur, &mut out);
        out.sort();
        out
    }
}

/// `∑_{|e| ≤ N} c_e t^e`.
#[derive(Clone, Debug)]
pub struct PowerSeries<V> {
    vars: usize,
    order: usize,
    zero: V,
    terms: BTreeMap<Exponent, V>,
}

/// Series of forms.
pub type FormSeries = PowerSeries<DVector<C64>>;

impl<V: Coefficient> PowerSeries<V> {
    /// The zero series; `zero` fixes the coefficient shape.
    pub fn new(vars: usize, order: usize, zero: V) -> Self {
        Self {
            vars,
            order,
            zero: zero.zero_like(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, order: usize, value: V) -> Self {
        let mut s = Self::new(vars, order, value.zero_like());
        s.set(Exponent::zero(vars), value);
        s
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero_coefficient(&self) -> &V {
        &self.zero
    }

    /// Sets a coefficient; terms above the truncation order are dropped.
    pub fn set(&mut self, e: Exponent, value: V) {
        assert_eq!(e.vars(), self.vars, "exponent arity");
        if e.degree() <= self.order {
            self.terms.insert(e, value);
        }
    }

    /// Adds `value` to the coefficient of `t^e`.
    pub fn accumulate(&mut self, e: Exponent, value: &V) {
        if e.degree() > self.order {
            return;
        }
        let next = match self.terms.get(&e) {
            Some(cur) => cur.add(value),
            None => value.clone(),
        };
        self.terms.insert(e, next);
    }

    pub fn coefficient(&self, e: &Exponent) -> V {
        self.terms.get(e).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &V)> {
        self.terms.iter()
    }

    /// Sum of coefficients of total degree `k` weighted by `t^e`, i.e. the
    /// homogeneous piece of degree `k` evaluated at `t`.
    pub fn homogeneous_eval(&self, k: usize, t: &[C64]) -> V {
        let mut acc = self.zero.clone();
        for (e, c) in self.terms.iter().filter(|(e, _)| e.degree() == k) {
            acc = acc.add(&c.scale(e.monomial_value(t)));
        }
        acc
    }

    fn check_arity(&self, other_vars: usize) -> Result<(), Error> {
        if self.vars != other_vars {
            return Err(Error::ArityMismatch {
                left: self.vars,
                right: other_vars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.check_arity(other.vars)?;
        let mut out = Self::new(self.vars, self.order.min(other.order), self.zero.clone());
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            out.accumulate(e.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::new(self.vars, self.order, self.zero.clone());
        for (e, v) in &self.terms {
            out.set(e.clone(), v.scale(c));
        }
        out
    }

    /// Lifts a linear map degreewise.
    pub fn map<W: Coefficient>(&self, f: impl Fn(&V) -> W) -> PowerSeries<W> {
        let zero = f(&self.zero);
        let mut out = PowerSeries::new(self.vars, self.order, zero);
        for (e, v) in &self.terms {
            out.set(e.clone(), f(v));
        }
        out
    }

    /// Lifts a bilinear map: the coefficient of `t^k` in the result is
    /// `∑_{i+j=k} f(a_i, b_j)`; terms above the smaller order are dropped.
    pub fn bilinear<W: Coefficient, U: Coefficient>(
        &self,
        other: &PowerSeries<W>,
        f: impl Fn(&V, &W) -> U,
    ) -> Result<PowerSeries<U>, Error> {
        self.check_arity(other.vars)?;
        let zero = f(&self.zero, &other.zero);
        let order = self.order.min(other.order);
        let mut out = PowerSeries::new(self.vars, order, zero);
        for (ea, a) in &self.terms {
            for (eb, b) in &other.terms {
                let e = ea.add(eb);
                if e.degree() <= order {
                    out.accumulate(e, &f(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Evaluates the polynomial at `t`.
    pub fn eval(&self, t: &[C64]) -> V {
        assert_eq!(t.len(), self.vars, "evaluation point arity");
        let mut acc = self.zero.clone();
        // Accumulate from the highest degree down so small terms are summed first.
        for (e, c) in self.terms.iter().rev() {
            acc = acc.add(&c.scale(e.monomial_value(t)));
        }
        acc
    }

    /// Formal derivative `∂/∂t_i`; the result has order `N - 1`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < self.vars, "direction out of range");
        let mut out = Self::new(self.vars, self.order.saturating_sub(1), self.zero.clone());
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut lowered = e.clone();
            lowered.0[i] -= 1;
            out.set(lowered, c.scale(C64::new(k as f64, 0.0)));
        }
        out
    }

    /// Largest coefficient modulus among terms of total degree `k`.
    pub fn degree_norm(&self, k: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(e, _)| e.degree() == k)
            .map(|(_, c)| c.max_norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.terms.values().map(|c| c.max_norm()).fold(0.0, f64::max)
    }
}
