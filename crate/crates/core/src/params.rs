//! Model constants at the resonant coupling `g = −(ν² + Ω)`, the phase-space
//! and higher-derivative state types, and the map between them.

use std::f64::consts::SQRT_2;

use serde::Serialize;
use thiserror::Error;

/// Rejection threshold for `ν² − Ω` and `|ν² + Ω|`.
pub const GUARD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("ν² − Ω = {0} must exceed {GUARD}")]
    DegenerateGap(f64),
    #[error("|ν² + Ω| = {0} must exceed {GUARD}")]
    VanishingCoupling(f64),
    #[error("sector label must be +1 or −1, got {0}")]
    InvalidSector(i32),
    #[error("g² − 4ν²Ω = {0} is negative")]
    ComplexBranch(f64),
    #[error("ν² − Ω + σ = {0} is not positive")]
    SingularSigma(f64),
    #[error("frequency radicand {0} is negative")]
    ComplexFrequency(f64),
    #[error("ν² + Ω − g = {0} is not positive")]
    SingularMap(f64),
    #[error("non-finite parameter")]
    NonFinite,
}

/// The sign label `η` of the surviving ground-state sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "i32")]
pub enum Sector {
    Plus,
    Minus,
}

impl From<Sector> for i32 {
    fn from(s: Sector) -> i32 {
        s.label()
    }
}

impl Sector {
    pub fn from_label(eta: i32) -> Result<Self, ParamError> {
        match eta {
            1 => Ok(Sector::Plus),
            -1 => Ok(Sector::Minus),
            other => Err(ParamError::InvalidSector(other)),
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Sector::Plus => 1.0,
            Sector::Minus => -1.0,
        }
    }

    pub fn label(self) -> i32 {
        match self {
            Sector::Plus => 1,
            Sector::Minus => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub nu2: f64,
    pub omega_cap: f64,
    pub eta: Sector,
    pub g: f64,
    pub kappa: f64,
    pub lambda: f64,
    /// Common PU frequency, `2κ`.
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl ModelParams {
    /// Derives every constant of the `ε = +1, η` sector at the resonant coupling.
    pub fn derive(nu2: f64, omega_cap: f64, eta: i32) -> Result<Self, ParamError> {
        if !nu2.is_finite() || !omega_cap.is_finite() {
            return Err(ParamError::NonFinite);
        }
        let eta = Sector::from_label(eta)?;
        let gap = nu2 - omega_cap;
        if gap <= GUARD {
            return Err(ParamError::DegenerateGap(gap));
        }
        let sum = nu2 + omega_cap;
        if sum.abs() <= GUARD {
            return Err(ParamError::VanishingCoupling(sum));
        }
        let root = gap.sqrt();
        let e = eta.sign();
        let denom = 2.0 * SQRT_2 * root;
        let kappa = root / SQRT_2;
        Ok(Self {
            nu2,
            omega_cap,
            eta,
            g: -sum,
            kappa,
            lambda: sum / (SQRT_2 * root),
            omega: 2.0 * kappa,
            alpha: e * (3.0 * nu2 - omega_cap) / denom,
            beta: -e * (nu2 - 3.0 * omega_cap) / denom,
            gamma: e * sum / denom,
        })
    }

    /// `ν² − Ω`
    pub fn gap(&self) -> f64 {
        self.nu2 - self.omega_cap
    }

    /// `ν² + Ω`
    pub fn sum(&self) -> f64 {
        self.nu2 + self.omega_cap
    }

    /// The same parameters in the other `η` sector.
    pub fn with_sector(&self, eta: Sector) -> Self {
        Self::derive(self.nu2, self.omega_cap, eta.label()).expect("already validated")
    }

    /// L² conditions on the Gaussian `exp(−½αx² − ½βy² + γxy)`.
    pub fn ground_state_normalizable(&self) -> bool {
        gaussian_normalizable(self.alpha, self.beta, self.gamma)
    }
}

pub fn gaussian_normalizable(alpha: f64, beta: f64, gamma: f64) -> bool {
    alpha > 0.0 && beta > 0.0 && alpha * beta - gamma * gamma > 0.0
}

/// Ground-state constants `(α, β, γ)` of the `(ε, η)` sector for arbitrary coupling `g`.
pub fn general_ground_params(
    nu2: f64,
    omega_cap: f64,
    g: f64,
    eps: i32,
    eta: i32,
) -> Result<(f64, f64, f64), ParamError> {
    let eps = Sector::from_label(eps)?.sign();
    let eta = Sector::from_label(eta)?.sign();
    let disc = g * g - 4.0 * nu2 * omega_cap;
    if disc < 0.0 {
        return Err(ParamError::ComplexBranch(disc));
    }
    let sigma = eps * disc.sqrt();
    let inner = nu2 - omega_cap + sigma;
    if inner <= GUARD {
        return Err(ParamError::SingularSigma(inner));
    }
    let big_sigma = 2.0 * eta * inner.sqrt();
    Ok((
        (2.0 * nu2 + sigma) / big_sigma,
        (2.0 * omega_cap - sigma) / big_sigma,
        -g / big_sigma,
    ))
}

/// The two PU frequencies `ω₁ ≤ ω₂` for a general coupling.
pub fn pu_frequencies(nu2: f64, omega_cap: f64, g: f64) -> Result<(f64, f64), ParamError> {
    let sum = nu2 + omega_cap;
    let outer = sum * sum - g * g;
    if outer < 0.0 {
        return Err(ParamError::ComplexFrequency(outer));
    }
    let split = outer.sqrt();
    let gap = nu2 - omega_cap;
    let (r1, r2) = (gap - split, gap + split);
    if r1 < 0.0 {
        return Err(ParamError::ComplexFrequency(r1));
    }
    Ok((SQRT_2 * r1.sqrt(), SQRT_2 * r2.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PuState {
    pub q: f64,
    pub qdot: f64,
    pub qddot: f64,
    pub qdddot: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhaseState {
    pub fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        Self { x, y, px, py }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.px, self.py]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn norm_inf(self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Maps a ghost phase-space point to the higher-derivative variables.
///
/// `q` and `q̈` are linear in `(x, y)`; `q̇` and `q⃛` are their time
/// derivatives along the flow `ẋ = 2p_x`, `ẏ = −2p_y`, which fixes the
/// relative sign of `p_y`.
pub fn pu_from_ghost(s: PhaseState, p: &ModelParams) -> Result<PuState, ParamError> {
    let radicand = p.sum() - p.g;
    if radicand <= GUARD {
        return Err(ParamError::SingularMap(radicand));
    }
    let r = radicand.sqrt();
    let cx = 2.0 * p.nu2 - p.g;
    let cy = p.g - 2.0 * p.omega_cap;
    Ok(PuState {
        q: -(s.x + s.y) / (2.0 * SQRT_2 * r),
        qdot: -(s.px - s.py) / (SQRT_2 * r),
        qddot: (cx * s.x + cy * s.y) / (SQRT_2 * r),
        qdddot: SQRT_2 * (cx * s.px - cy * s.py) / r,
    })
}

/// `H_PU` with both frequencies equal to `ω`.
pub fn hpu_value(s: PuState, p: &ModelParams) -> f64 {
    let w2 = p.omega * p.omega;
    0.5 * s.qddot * s.qddot - w2 * s.qdot * s.qdot - 0.5 * w2 * w2 * s.q * s.q - s.qdot * s.qdddot
}

/// `p_x² − p_y² + ν²x² + Ωy² + g·xy`
pub fn hg_value(s: PhaseState, p: &ModelParams) -> f64 {
    s.px * s.px - s.py * s.py
        + p.nu2 * s.x * s.x
        + p.omega_cap * s.y * s.y
        + p.g * s.x * s.y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn reference_point_constants() {
        let p = ModelParams::derive(2.0, 1.0, 1).unwrap();
        assert!(close(p.alpha, 1.767766952966369, 1e-12));
        assert!(close(p.beta, 0.3535533905932738, 1e-12));
        assert!(close(p.gamma, 1.0606601717798212, 1e-12));
        assert!(close(p.kappa, std::f64::consts::FRAC_1_SQRT_2, 1e-12));
        assert!(close(p.lambda, 2.1213203435596424, 1e-12));
        assert_eq!(p.g, -3.0);
        assert!(close(p.omega, SQRT_2, 1e-12));
    }

    #[test]
    fn zero_omega_constants() {
        let p = ModelParams::derive(1.0, 0.0, 1).unwrap();
        let r = 1.0 / (2.0 * SQRT_2);
        assert!(close(p.alpha, 3.0 * r, 1e-14));
        assert!(close(p.beta, -r, 1e-14));
        assert!(close(p.gamma, r, 1e-14));
        assert!(close(p.kappa, 1.0 / SQRT_2, 1e-14));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ModelParams::derive(1.0, 1.0, 1), Err(ParamError::DegenerateGap(_))));
        assert!(matches!(ModelParams::derive(1.0, -1.0, 1), Err(ParamError::VanishingCoupling(_))));
        assert_eq!(ModelParams::derive(2.0, 1.0, 0), Err(ParamError::InvalidSector(0)));
        assert_eq!(ModelParams::derive(f64::NAN, 1.0, 1), Err(ParamError::NonFinite));
    }

    #[test]
    fn general_params_reduce_at_resonance() {
        for eta in [1, -1] {
            let p = ModelParams::derive(2.0, 1.0, eta).unwrap();
            let (a, b, c) = general_ground_params(2.0, 1.0, -3.0, 1, eta).unwrap();
            assert!(close(a, p.alpha, 1e-12) && close(b, p.beta, 1e-12) && close(c, p.gamma, 1e-12));
            assert!(matches!(
                general_ground_params(2.0, 1.0, -3.0, -1, eta),
                Err(ParamError::SingularSigma(_))
            ));
        }
    }

    #[test]
    fn general_params_off_resonance() {
        let (a, b, c) = general_ground_params(1.0, 1.0, 2.0001, 1, 1).unwrap();
        let sigma = (2.0001f64 * 2.0001 - 4.0).sqrt();
        let big = 2.0 * sigma.sqrt();
        assert!(close(a, (2.0 + sigma) / big, 1e-12));
        assert!(close(b, (2.0 - sigma) / big, 1e-12));
        assert!(close(c, -2.0001 / big, 1e-12));
        assert!(matches!(
            general_ground_params(1.0, 1.0, 1.0, 1, 1),
            Err(ParamError::ComplexBranch(_))
        ));
    }

    #[test]
    fn frequencies() {
        let (w1, w2) = pu_frequencies(2.0, 1.0, -3.0).unwrap();
        assert!(close(w1, SQRT_2, 1e-7) && close(w2, SQRT_2, 1e-12));
        let (w1, w2) = pu_frequencies(1.0, 0.0, 0.0).unwrap();
        assert!(close(w1, 0.0, 1e-15) && close(w2, 2.0, 1e-14));
        assert!(matches!(pu_frequencies(1.0, 0.0, 2.0), Err(ParamError::ComplexFrequency(_))));
    }

    #[test]
    fn ghost_to_pu_reference_point() {
        let p = ModelParams::derive(2.0, 1.0, 1).unwrap();
        let s = pu_from_ghost(PhaseState::new(1.0, 0.0, 0.0, 0.0), &p).unwrap();
        assert!(close(s.q, -1.0 / (2.0 * SQRT_2 * 6f64.sqrt()), 1e-15));
        assert!(close(s.q, -0.14433756729740643, 1e-15));
        assert!(close(s.qddot, 7.0 / 12f64.sqrt(), 1e-14));
        assert_eq!((s.qdot, s.qdddot), (0.0, 0.0));
        assert_eq!(pu_from_ghost(PhaseState::default(), &p).unwrap(), PuState::default());
        let neg = ModelParams::derive(-1.5, -2.0, 1).unwrap();
        assert!(matches!(pu_from_ghost(PhaseState::default(), &neg), Err(ParamError::SingularMap(_))));
    }

    #[test]
    fn hamiltonian_values() {
        let p = ModelParams::derive(2.0, 1.0, 1).unwrap();
        let pu = PuState { q: 1.0, ..Default::default() };
        assert!(close(hpu_value(pu, &p), -2.0, 1e-14));
        assert_eq!(hpu_value(PuState::default(), &p), 0.0);
        assert_eq!(hg_value(PhaseState::new(1.0, 0.0, 0.0, 0.0), &p), 2.0);
        assert_eq!(hg_value(PhaseState::new(0.0, 0.0, 1.0, 1.0), &p), 0.0);
        assert_eq!(hg_value(PhaseState::new(1.0, 1.0, 0.0, 0.0), &p), 0.0);
    }

    #[test]
    fn resonance_classifier_rejects_both_sectors() {
        for eta in [1, -1] {
            let p = ModelParams::derive(2.0, 1.0, eta).unwrap();
            assert!(!p.ground_state_normalizable());
        }
        assert!(gaussian_normalizable(1.0, 1.0, 0.5));
    }
}
