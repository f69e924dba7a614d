//! Two-variable Weyl algebra: differential operators with polynomial
//! coefficients, stored in normal order (multiplications left of derivatives).
//!
//! A term keyed by [`Multi`] `(a, b, c, d)` means `coeff · u^a v^b ∂_u^c ∂_v^d`.
//! The variable pair `(u, v)` is tagged by [`Vars`]: `(x, y)` for the ghostly
//! chart, `(q, q̈)` for the higher-derivative chart. Mixing tags is an error.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::poly::{Poly2, PRUNE_REL};
use crate::states::GaussPolyState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Vars {
    /// `(x, y)`
    Xy,
    /// `(q, q̈)`
    QQddot,
}

impl Vars {
    pub fn labels(self) -> (&'static str, &'static str) {
        match self {
            Vars::Xy => ("x", "y"),
            Vars::QQddot => ("q", "qdd"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeylError {
    #[error("variable mismatch: {0:?} vs {1:?}")]
    VarMismatch(Vars, Vars),
    #[error("change of variables matrix is singular")]
    SingularChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Multi {
    pub mul_u: u32,
    pub mul_v: u32,
    pub der_u: u32,
    pub der_v: u32,
}

impl Multi {
    pub const ONE: Multi = Multi::new(0, 0, 0, 0);

    pub const fn new(mul_u: u32, mul_v: u32, der_u: u32, der_v: u32) -> Self {
        Self { mul_u, mul_v, der_u, der_v }
    }

    pub fn total_degree(&self) -> u32 {
        self.mul_u + self.mul_v + self.der_u + self.der_v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRecord {
    pub mul_u: u32,
    pub mul_v: u32,
    pub der_u: u32,
    pub der_v: u32,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylOp {
    vars: Vars,
    terms: BTreeMap<Multi, f64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

impl WeylOp {
    pub fn zero(vars: Vars) -> Self {
        Self { vars, terms: BTreeMap::new() }
    }

    pub fn identity(vars: Vars) -> Self {
        Self::constant(vars, 1.0)
    }

    pub fn constant(vars: Vars, c: f64) -> Self {
        Self::term(vars, Multi::ONE, c)
    }

    pub fn term(vars: Vars, m: Multi, c: f64) -> Self {
        let mut op = Self::zero(vars);
        if c != 0.0 {
            op.terms.insert(m, c);
        }
        op
    }

    pub fn from_terms<I: IntoIterator<Item = (Multi, f64)>>(vars: Vars, iter: I) -> Self {
        let mut op = Self::zero(vars);
        for (m, c) in iter {
            op.accumulate(m, c);
        }
        op.prune();
        op
    }

    pub fn d_u(vars: Vars) -> Self {
        Self::term(vars, Multi::new(0, 0, 1, 0), 1.0)
    }

    pub fn d_v(vars: Vars) -> Self {
        Self::term(vars, Multi::new(0, 0, 0, 1), 1.0)
    }

    /// Multiplication operator by the polynomial `p(u, v)`.
    pub fn multiply_by(vars: Vars, p: &Poly2) -> Self {
        Self::from_terms(vars, p.terms().map(|((i, j), c)| (Multi::new(i, j, 0, 0), c)))
    }

    /// Multiplication by `cu·u + cv·v`.
    pub fn linear(vars: Vars, cu: f64, cv: f64) -> Self {
        Self::multiply_by(vars, &Poly2::linear(cu, cv))
    }

    /// First-order derivative `cu·∂_u + cv·∂_v`.
    pub fn gradient(vars: Vars, cu: f64, cv: f64) -> Self {
        Self::from_terms(
            vars,
            [(Multi::new(0, 0, 1, 0), cu), (Multi::new(0, 0, 0, 1), cv)],
        )
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (Multi, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn coeff(&self, m: Multi) -> f64 {
        self.terms.get(&m).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Multi::total_degree).max().unwrap_or(0)
    }

    fn accumulate(&mut self, m: Multi, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.terms.remove(&m);
        }
    }

    fn prune(&mut self) {
        let cut = PRUNE_REL * self.max_abs();
        self.terms.retain(|_, c| c.abs() > cut);
    }

    fn check(&self, other: &Self) -> Result<(), WeylError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(WeylError::VarMismatch(self.vars, other.vars))
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero(self.vars);
        }
        Self {
            vars: self.vars,
            terms: self.terms.iter().map(|(&m, &c)| (m, c * s)).collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            out.accumulate(m, c);
        }
        out.prune();
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, WeylError> {
        self.checked_add(&other.scale(-1.0))
    }

    /// Normal-ordered product `self ∘ other`.
    ///
    /// Uses `∂^c u^e = Σ_j C(c, j) (e)_j u^(e−j) ∂^(c−j)` independently in
    /// each variable.
    pub fn checked_compose(&self, other: &Self) -> Result<Self, WeylError> {
        self.check(other)?;
        let mut out = Self::zero(self.vars);
        for (l, &cl) in &self.terms {
            for (r, &cr) in &other.terms {
                for j in 0..=l.der_u.min(r.mul_u) {
                    let fu = binomial(l.der_u, j) * falling(r.mul_u, j);
                    for k in 0..=l.der_v.min(r.mul_v) {
                        let fv = binomial(l.der_v, k) * falling(r.mul_v, k);
                        let m = Multi::new(
                            l.mul_u + r.mul_u - j,
                            l.mul_v + r.mul_v - k,
                            l.der_u - j + r.der_u,
                            l.der_v - k + r.der_v,
                        );
                        out.accumulate(m, cl * cr * fu * fv);
                    }
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn checked_commutator(&self, other: &Self) -> Result<Self, WeylError> {
        self.checked_compose(other)?
            .checked_sub(&other.checked_compose(self)?)
    }

    pub fn compose(&self, other: &Self) -> Self {
        self.checked_compose(other).expect("WeylOp variable mismatch")
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.checked_commutator(other).expect("WeylOp variable mismatch")
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity(self.vars);
        for _ in 0..n {
            out = out.compose(self);
        }
        out
    }

    /// Relative residual `max|A−B| / max(1, max|A|, max|B|)`.
    pub fn relative_residual(&self, other: &Self) -> Result<f64, WeylError> {
        self.check(other)?;
        let mut diff: f64 = 0.0;
        for (m, &c) in &self.terms {
            diff = diff.max((c - other.coeff(*m)).abs());
        }
        for (m, &c) in &other.terms {
            if !self.terms.contains_key(m) {
                diff = diff.max(c.abs());
            }
        }
        Ok(diff / 1f64.max(self.max_abs()).max(other.max_abs()))
    }

    /// `max|coeff(A−B)| ≤ tol · max(1, max|A|, max|B|)`; false on a variable mismatch.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.relative_residual(other).is_ok_and(|r| r <= tol)
    }

    /// Pointwise action on a pure polynomial.
    pub fn apply_to_poly(&self, p: &Poly2) -> Poly2 {
        let mut cache: BTreeMap<(u32, u32), Poly2> = BTreeMap::new();
        let mut out = Poly2::zero();
        for (m, &c) in &self.terms {
            let d = cache.entry((m.der_u, m.der_v)).or_insert_with(|| {
                let mut q = p.clone();
                for _ in 0..m.der_v {
                    q = q.d_v();
                }
                for _ in 0..m.der_u {
                    q = q.d_u();
                }
                q
            });
            for ((i, j), a) in d.terms() {
                out.add_term(i + m.mul_u, j + m.mul_v, c * a);
            }
        }
        out.prune();
        out
    }

    /// Exact action on `P · exp(−½αu² − ½βv² + γuv)`; the Gaussian is unchanged.
    ///
    /// On such states `∂_u` acts on `P` as `∂_u + (−αu + γv)` and `∂_v` as
    /// `∂_v + (γu − βv)`.
    pub fn apply_to_state(&self, psi: &GaussPolyState) -> Result<GaussPolyState, WeylError> {
        if self.vars != psi.vars() {
            return Err(WeylError::VarMismatch(self.vars, psi.vars()));
        }
        let g = psi.gauss();
        let lift_u = Poly2::linear(-g.alpha, g.gamma);
        let lift_v = Poly2::linear(g.gamma, -g.beta);
        let du = |q: &Poly2| q.d_u().add(&q.mul(&lift_u));
        let dv = |q: &Poly2| q.d_v().add(&q.mul(&lift_v));

        let max_du = self.terms.keys().map(|m| m.der_u).max().unwrap_or(0);
        let max_dv = self.terms.keys().map(|m| m.der_v).max().unwrap_or(0);
        // table[c][d] = D_u^c D_v^d P
        let mut table: Vec<Vec<Poly2>> = Vec::with_capacity(max_du as usize + 1);
        let mut col = vec![psi.poly().clone()];
        for _ in 0..max_dv {
            let next = dv(col.last().unwrap());
            col.push(next);
        }
        table.push(col);
        for c in 1..=max_du as usize {
            let prev = &table[c - 1];
            let row: Vec<Poly2> = prev.iter().map(&du).collect();
            table.push(row);
        }

        let mut out = Poly2::zero();
        for (m, &c) in &self.terms {
            let d = &table[m.der_u as usize][m.der_v as usize];
            for ((i, j), a) in d.terms() {
                out.add_term(i + m.mul_u, j + m.mul_v, c * a);
            }
        }
        out.prune();
        Ok(GaussPolyState::new(psi.vars(), out, g))
    }

    /// Rewrites the operator in new coordinates `w = T·(u, v)ᵀ`.
    ///
    /// Old coordinates become `T⁻¹ w`, and `∂_{old_j} = Σ_i T_ij ∂_{w_i}`.
    /// Both substitutions keep multiplications left of derivatives, so the
    /// result is already normal ordered.
    pub fn change_of_variables(&self, t: [[f64; 2]; 2]) -> Result<Self, WeylError> {
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        if det.abs() < 1e-300 {
            return Err(WeylError::SingularChange);
        }
        let inv = [
            [t[1][1] / det, -t[0][1] / det],
            [-t[1][0] / det, t[0][0] / det],
        ];
        let u_old = Poly2::linear(inv[0][0], inv[0][1]);
        let v_old = Poly2::linear(inv[1][0], inv[1][1]);
        // derivative polynomials in formal symbols (∂_w1, ∂_w2)
        let du_old = Poly2::linear(t[0][0], t[1][0]);
        let dv_old = Poly2::linear(t[0][1], t[1][1]);

        let mut out = Self::zero(self.vars);
        for (m, &c) in &self.terms {
            let pos = u_old.pow(m.mul_u).mul(&v_old.pow(m.mul_v));
            let der = du_old.pow(m.der_u).mul(&dv_old.pow(m.der_v));
            for ((i, j), a) in pos.terms() {
                for ((k, l), b) in der.terms() {
                    out.accumulate(Multi::new(i, j, k, l), c * a * b);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Sorted term list for reports (ordering by multi-index).
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(m, &coeff)| TermRecord {
                mul_u: m.mul_u,
                mul_v: m.mul_v,
                der_u: m.der_u,
                der_v: m.der_v,
                coeff,
            })
            .collect()
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (u, v) = self.vars.labels();
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "{c:+.16e} {u}^{} {v}^{} d{u}^{} d{v}^{}",
                m.mul_u, m.mul_v, m.der_u, m.der_v
            )?;
        }
        Ok(())
    }
}

impl Add for &WeylOp {
    type Output = WeylOp;
    fn add(self, rhs: &WeylOp) -> WeylOp {
        self.checked_add(rhs).expect("WeylOp variable mismatch")
    }
}

impl Sub for &WeylOp {
    type Output = WeylOp;
    fn sub(self, rhs: &WeylOp) -> WeylOp {
        self.checked_sub(rhs).expect("WeylOp variable mismatch")
    }
}

impl Mul for &WeylOp {
    type Output = WeylOp;
    fn mul(self, rhs: &WeylOp) -> WeylOp {
        self.compose(rhs)
    }
}

impl Mul<&WeylOp> for f64 {
    type Output = WeylOp;
    fn mul(self, rhs: &WeylOp) -> WeylOp {
        rhs.scale(self)
    }
}

impl Neg for &WeylOp {
    type Output = WeylOp;
    fn neg(self) -> WeylOp {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: Vars = Vars::Xy;

    fn u() -> WeylOp {
        WeylOp::linear(V, 1.0, 0.0)
    }

    #[test]
    fn canonical_commutation() {
        let du = WeylOp::d_u(V);
        let prod = du.compose(&u());
        assert_eq!(prod.coeff(Multi::new(1, 0, 1, 0)), 1.0);
        assert_eq!(prod.coeff(Multi::ONE), 1.0);
        assert_eq!(prod.len(), 2);
        assert!(du.commutator(&u()).approx_eq(&WeylOp::identity(V), 0.0));
    }

    #[test]
    fn second_order_reordering() {
        // ∂² u² = u²∂² + 4u∂ + 2
        let d2 = WeylOp::d_u(V).pow(2);
        let u2 = u().pow(2);
        let prod = d2.compose(&u2);
        let expected = WeylOp::from_terms(
            V,
            [
                (Multi::new(2, 0, 2, 0), 1.0),
                (Multi::new(1, 0, 1, 0), 4.0),
                (Multi::ONE, 2.0),
            ],
        );
        assert!(prod.approx_eq(&expected, 0.0));
    }

    #[test]
    fn additive_identity_and_cancellation() {
        let a = WeylOp::from_terms(V, [(Multi::new(1, 0, 1, 0), 2.5), (Multi::new(0, 2, 0, 0), -1.0)]);
        assert_eq!(&a + &WeylOp::zero(V), a);
        let xdx = WeylOp::term(V, Multi::new(1, 0, 1, 0), 1.0);
        assert!((&xdx - &xdx).is_zero());
        assert_eq!(a.compose(&WeylOp::identity(V)), a);
    }

    #[test]
    fn identity_vs_zero_not_equal() {
        assert!(!WeylOp::identity(V).approx_eq(&WeylOp::zero(V), 1e-9));
    }

    #[test]
    fn mixed_variables_rejected() {
        let a = WeylOp::d_u(Vars::Xy);
        let b = WeylOp::d_u(Vars::QQddot);
        assert_eq!(a.checked_compose(&b), Err(WeylError::VarMismatch(Vars::Xy, Vars::QQddot)));
        assert!(!a.approx_eq(&b, 1.0));
    }

    #[test]
    fn apply_to_poly_basic() {
        let cube = Poly2::monomial(3, 0, 1.0);
        let out = WeylOp::d_u(V).apply_to_poly(&cube);
        assert_eq!(out, Poly2::monomial(2, 0, 3.0));
        let p = Poly2::linear(1.0, 2.0);
        assert_eq!(WeylOp::constant(V, 3.0).apply_to_poly(&p), p.scale(3.0));
    }

    #[test]
    fn rotation_of_laplacian_is_invariant() {
        let lap = &WeylOp::d_u(V).pow(2) + &WeylOp::d_v(V).pow(2);
        let (s, c) = 0.3f64.sin_cos();
        let rotated = lap.change_of_variables([[c, s], [-s, c]]).unwrap();
        assert!(rotated.approx_eq(&lap, 1e-14));
    }
}
