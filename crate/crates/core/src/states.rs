//! Polynomial × Gaussian wavefunctions, the class closed under every
//! [`WeylOp`](crate::weyl::WeylOp) action.

use serde::Serialize;
use thiserror::Error;

use crate::params::{gaussian_normalizable, ModelParams};
use crate::poly::Poly2;
use crate::weyl::Vars;

/// Tolerance on Gaussian parameters when combining states.
pub const GAUSS_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("Gaussian parameters differ: {0:?} vs {1:?}")]
    GaussianMismatch(Gaussian, Gaussian),
    #[error("variable mismatch: {0:?} vs {1:?}")]
    VarMismatch(Vars, Vars),
}

/// Exponent `−½αu² − ½βv² + γuv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gaussian {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Gaussian {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn exponent(&self, u: f64, v: f64) -> f64 {
        -0.5 * self.alpha * u * u - 0.5 * self.beta * v * v + self.gamma * u * v
    }

    pub fn normalizable(&self) -> bool {
        gaussian_normalizable(self.alpha, self.beta, self.gamma)
    }

    fn matches(&self, other: &Self) -> bool {
        (self.alpha - other.alpha).abs() <= GAUSS_MATCH_TOL
            && (self.beta - other.beta).abs() <= GAUSS_MATCH_TOL
            && (self.gamma - other.gamma).abs() <= GAUSS_MATCH_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussPolyState {
    vars: Vars,
    poly: Poly2,
    gauss: Gaussian,
}

impl GaussPolyState {
    pub fn new(vars: Vars, poly: Poly2, gauss: Gaussian) -> Self {
        Self { vars, poly, gauss }
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    pub fn poly(&self) -> &Poly2 {
        &self.poly
    }

    pub fn gauss(&self) -> Gaussian {
        self.gauss
    }

    /// Largest polynomial coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.poly.max_abs()
    }

    pub fn add(&self, other: &Self) -> Result<Self, StateError> {
        if self.vars != other.vars {
            return Err(StateError::VarMismatch(self.vars, other.vars));
        }
        if !self.gauss.matches(&other.gauss) {
            return Err(StateError::GaussianMismatch(self.gauss, other.gauss));
        }
        Ok(Self::new(self.vars, self.poly.add(&other.poly), self.gauss))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, StateError> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.vars, self.poly.scale(s), self.gauss)
    }

    /// Multiplies the polynomial factor by `p`.
    pub fn times_poly(&self, p: &Poly2) -> Self {
        Self::new(self.vars, self.poly.mul(p), self.gauss)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.poly.max_abs() <= tol
    }

    pub fn eval_at(&self, u: f64, v: f64) -> f64 {
        self.poly.eval(u, v) * self.gauss.exponent(u, v).exp()
    }

    /// Largest coefficient of `self − other`, or an error if the Gaussians differ.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, StateError> {
        if !self.gauss.matches(&other.gauss) {
            return Err(StateError::GaussianMismatch(self.gauss, other.gauss));
        }
        Ok(self.poly.max_abs_diff(&other.poly))
    }

    /// Returns `c` with `self = c · other` when every coefficient agrees to
    /// `tol` relative to the larger of the two states.
    pub fn proportionality(&self, other: &Self, tol: f64) -> Option<f64> {
        if !self.gauss.matches(&other.gauss) || other.poly.is_empty() {
            return None;
        }
        let (pivot, denom) = other
            .poly
            .terms()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))?;
        let c = self.poly.coeff(pivot.0, pivot.1) / denom;
        let resid = self.poly.max_abs_diff(&other.poly.scale(c));
        let scale = self.scale().max(other.scale() * c.abs()).max(f64::MIN_POSITIVE);
        (resid <= tol * scale).then_some(c)
    }
}

/// `ψ₀ = exp(−½αx² − ½βy² + γxy)` with unit normalisation constant.
pub fn ground_state(p: &ModelParams) -> GaussPolyState {
    GaussPolyState::new(
        Vars::Xy,
        Poly2::constant(1.0),
        Gaussian::new(p.alpha, p.beta, p.gamma),
    )
}

/// `ψ_m = (x − y)^m ψ₀`, the kernel of the lowering generator.
pub fn chain_seed(m: u32, p: &ModelParams) -> GaussPolyState {
    ground_state(p).times_poly(&Poly2::linear(1.0, -1.0).pow(m))
}
