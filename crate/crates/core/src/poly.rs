//! Sparse bivariate polynomials with real coefficients.
//!
//! Terms are keyed by exponent pairs `(i, j)` meaning `u^i v^j`. The map is
//! kept canonical: no stored coefficient is exactly zero, and arithmetic
//! prunes relative dust below `PRUNE_REL` times the largest magnitude.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Relative threshold below which coefficients are dropped after arithmetic.
pub const PRUNE_REL: f64 = 1e-14;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), f64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn monomial(i: u32, j: u32, c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    /// `cu·u + cv·v`.
    pub fn linear(cu: f64, cv: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, cu);
        p.add_term(0, 1, cv);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), f64)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for ((i, j), c) in iter {
            p.add_term(i, j, c);
        }
        p.prune();
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Accumulates without pruning; callers prune once at the end.
    pub(crate) fn add_term(&mut self, i: u32, j: u32, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub(crate) fn prune(&mut self) {
        let cut = PRUNE_REL * self.max_abs();
        self.terms.retain(|_, c| c.abs() > cut && *c != 0.0);
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), &c) in &other.terms {
            out.add_term(i, j, c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &a) in &self.terms {
            for (&(k, l), &b) in &other.terms {
                out.add_term(i + k, j + l, a * b);
            }
        }
        out.prune();
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Multiplies by `u^a v^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        Self {
            terms: self.terms.iter().map(|(&(i, j), &c)| ((i + a, j + b), c)).collect(),
        }
    }

    pub fn d_u(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            if i > 0 {
                out.add_term(i - 1, j, c * i as f64);
            }
        }
        out
    }

    pub fn d_v(&self) -> Self {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            if j > 0 {
                out.add_term(i, j - 1, c * j as f64);
            }
        }
        out
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| c * u.powi(i as i32) * v.powi(j as i32))
            .sum()
    }

    /// Largest coefficient of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (&k, &c) in &self.terms {
            m = m.max((c - other.terms.get(&k).copied().unwrap_or(0.0)).abs());
        }
        for (&k, &c) in &other.terms {
            if !self.terms.contains_key(&k) {
                m = m.max(c.abs());
            }
        }
        m
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), &c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c:.16e}*u^{i}*v^{j}")?;
        }
        Ok(())
    }
}
