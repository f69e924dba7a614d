//! Generalised eigenspaces of `H_g`: fixed-`K` sectors, Jordan chains under
//! `M₊`, and the intertwiner ladder `A₊ⁿψ₀`.

use std::f64::consts::SQRT_2;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::OperatorAlgebra;
use crate::params::{ModelParams, Sector};
use crate::poly::Poly2;
use crate::report::{Check, Report};
use crate::states::{chain_seed, ground_state, GaussPolyState, StateError};
use crate::weyl::{WeylError, WeylOp};

pub const MAX_CHAIN_DEPTH: u32 = 12;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("chain depth {0} outside 1..={MAX_CHAIN_DEPTH}")]
    ChainDepthExceeded(u32),
    #[error("the explicit M+ action is only stated for the η = +1 sector")]
    InvalidSector,
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// `(n + 1)(α − β)`, which equals `2ηκ(n + 1)`.
pub fn eigenvalue_e(n: u32, p: &ModelParams) -> f64 {
    f64::from(n + 1) * (p.alpha - p.beta)
}

/// `E_n` grows without bound in the direction of `sign(α − β)`.
pub fn bounded_below(p: &ModelParams) -> bool {
    p.alpha - p.beta > 0.0
}

fn apply(op: &WeylOp, psi: &GaussPolyState) -> Result<GaussPolyState, SpectrumError> {
    Ok(op.apply_to_state(psi)?)
}

/// Largest coefficient of `lhs − rhs` divided by `scale`.
fn state_residual(lhs: &GaussPolyState, rhs: &GaussPolyState, scale: f64) -> Result<f64, SpectrumError> {
    Ok(lhs.max_abs_diff(rhs)? / scale.max(f64::MIN_POSITIVE))
}

/// Eigen-check `op ψ = e ψ`, relative to the larger of `ψ` and `op ψ`.
fn eigen_residual(op: &WeylOp, psi: &GaussPolyState, e: f64) -> Result<f64, SpectrumError> {
    let out = apply(op, psi)?;
    let scale = psi.scale().max(out.scale()).max(1.0);
    state_residual(&out, &psi.scaled(e), scale)
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanChainReport {
    pub k: u32,
    /// `ψ_{k,ℓ} = M₊^ℓ ψ_{k−1}` for `ℓ = 0 … k−1`.
    pub states: Vec<GaussPolyState>,
    pub termination_residual: f64,
    /// `(H_g − 2ηκk)ψ_{k,ℓ} − ℓ(k−ℓ)ψ_{k,ℓ−1}` for `ℓ = 0 … k−1`, the `ℓ = 0`
    /// entry being the plain eigen-equation.
    pub relation_residuals: Vec<f64>,
    /// `H₂ψ_{k,ℓ} − √2ηκk ψ_{k,ℓ}` for every state.
    pub h2_residuals: Vec<f64>,
    /// Smallest `‖ψ_{k,ℓ}‖ / ‖ψ_{k,ℓ−1}‖`, confirming no raising step
    /// collapses to round-off. `1` for a single-state chain.
    pub min_step_ratio: f64,
    pub eigenvalue: f64,
    pub scale: f64,
    pub tolerance: f64,
}

impl JordanChainReport {
    pub fn pass(&self) -> bool {
        self.termination_residual <= self.tolerance
            && self.relation_residuals.iter().all(|&r| r <= self.tolerance)
            && self.h2_residuals.iter().all(|&r| r <= self.tolerance)
            && self.min_step_ratio > self.tolerance
    }

    pub fn to_report(&self) -> Report {
        let tag = format!("chain[k={}]", self.k);
        let mut rep = Report::new();
        rep.push(Check::new(format!("{tag} termination"), self.termination_residual, self.tolerance));
        for (l, &r) in self.relation_residuals.iter().enumerate() {
            rep.push(Check::new(format!("{tag} jordan l={l}"), r, self.tolerance));
        }
        let h2 = self.h2_residuals.iter().copied().fold(0.0, f64::max);
        rep.push(Check::new(format!("{tag} H2 diagonal"), h2, self.tolerance));
        rep.push(Check::claim(format!("{tag} states nonzero"), self.min_step_ratio > self.tolerance));
        rep
    }
}

pub fn build_chain(k: u32, p: &ModelParams, tol: f64) -> Result<JordanChainReport, SpectrumError> {
    if !(1..=MAX_CHAIN_DEPTH).contains(&k) {
        return Err(SpectrumError::ChainDepthExceeded(k));
    }
    let alg = OperatorAlgebra::new(p);
    let mplus = &alg.su2.m_plus;
    let mut states = vec![chain_seed(k - 1, p)];
    for _ in 1..k {
        let next = apply(mplus, states.last().expect("seeded"))?;
        states.push(next);
    }
    let last = apply(mplus, states.last().expect("seeded"))?;
    let scale = states.iter().map(GaussPolyState::scale).fold(1f64, f64::max);

    let kf = f64::from(k);
    let eigenvalue = 2.0 * p.eta.sign() * p.kappa * kf;
    let shifted = &alg.hg - &WeylOp::constant(alg.hg.vars(), eigenvalue);
    let mut relation_residuals = Vec::with_capacity(states.len());
    for (l, psi) in states.iter().enumerate() {
        let lhs = apply(&shifted, psi)?;
        let rhs = match l {
            0 => psi.scaled(0.0),
            _ => {
                let lf = l as f64;
                states[l - 1].scaled(lf * (kf - lf))
            }
        };
        relation_residuals.push(state_residual(&lhs, &rhs, scale)?);
    }
    let h2_eig = SQRT_2 * p.eta.sign() * p.kappa * kf;
    let h2_residuals = states
        .iter()
        .map(|psi| Ok(apply(&alg.h2, psi)?.max_abs_diff(&psi.scaled(h2_eig))? / scale))
        .collect::<Result<Vec<_>, SpectrumError>>()?;

    Ok(JordanChainReport {
        k,
        termination_residual: last.scale() / scale,
        min_step_ratio: states.windows(2).map(|w| w[1].scale() / w[0].scale()).fold(1f64, f64::min),
        states,
        relation_residuals,
        h2_residuals,
        eigenvalue,
        scale,
        tolerance: tol,
    })
}

/// `Kψ_m = η(m+1)ψ_m`, `M₀ψ_m = −(m/2)ψ_m` and `M₋ψ_m = 0` on the seed
/// `ψ_m = (x − y)^m ψ₀`.
pub fn verify_sector_actions(m: u32, p: &ModelParams, tol: f64) -> Result<Report, SpectrumError> {
    if m > MAX_CHAIN_DEPTH {
        return Err(SpectrumError::ChainDepthExceeded(m));
    }
    let alg = OperatorAlgebra::new(p);
    let psi = chain_seed(m, p);
    let mf = f64::from(m);
    Ok(Report::from_iter([
        Check::new(format!("sector[m={m}] K"), eigen_residual(&alg.k, &psi, p.eta.sign() * (mf + 1.0))?, tol),
        Check::new(format!("sector[m={m}] M0"), eigen_residual(&alg.su2.m0, &psi, -0.5 * mf)?, tol),
        Check::new(format!("sector[m={m}] M-"), eigen_residual(&alg.su2.m_minus, &psi, 0.0)?, tol),
    ]))
}

/// `χ = [ν²(3x + y) − Ω(x + 3y)] / (2√2 √(ν² − Ω))`
pub fn chi(p: &ModelParams) -> Poly2 {
    Poly2::linear(3.0 * p.nu2 - p.omega_cap, p.nu2 - 3.0 * p.omega_cap)
        .scale(1.0 / (2.0 * SQRT_2 * p.gap().sqrt()))
}

/// Compares `M₊ψ_k` with `(k/(ν²+Ω))[χψ_{k−1} + (1−k)ψ_{k−2}]`.
pub fn verify_mplus_explicit(k: u32, p: &ModelParams, tol: f64) -> Result<Report, SpectrumError> {
    if p.eta != Sector::Plus {
        return Err(SpectrumError::InvalidSector);
    }
    if k == 0 || k > MAX_CHAIN_DEPTH {
        return Err(SpectrumError::ChainDepthExceeded(k));
    }
    let alg = OperatorAlgebra::new(p);
    let lhs = apply(&alg.su2.m_plus, &chain_seed(k, p))?;
    let kf = f64::from(k);
    let mut rhs = chain_seed(k - 1, p).times_poly(&chi(p));
    if k >= 2 {
        rhs = rhs.add(&chain_seed(k - 2, p).scaled(1.0 - kf))?;
    }
    let rhs = rhs.scaled(kf / p.sum());
    let scale = lhs.scale().max(rhs.scale()).max(1.0);
    Ok(Report::from_iter([Check::new(
        format!("M+ explicit k={k}"),
        state_residual(&lhs, &rhs, scale)?,
        tol,
    )]))
}

#[derive(Debug, Clone, Serialize)]
pub struct Raised {
    pub n: u32,
    pub state: GaussPolyState,
    /// `A₊ⁿψ₀ = ratio · (x − y)ⁿψ₀`; `None` if the two are not proportional.
    pub ratio: Option<f64>,
    pub expected_magnitude: f64,
    pub measured_sign: Option<i32>,
    /// Whether the measured sign equals the `−η` prefactor of the printed `Pₙ`.
    pub matches_printed_sign: Option<bool>,
}

/// Applies `A₊` to `ψ₀` `n` times and compares with `(x − y)ⁿψ₀`.
pub fn raise_with_aplus(n: u32, p: &ModelParams, tol: f64) -> Result<Raised, SpectrumError> {
    if n > MAX_CHAIN_DEPTH {
        return Err(SpectrumError::ChainDepthExceeded(n));
    }
    let a_plus = crate::algebra::build_intertwiners(p).a_plus;
    let mut state = ground_state(p);
    for _ in 0..n {
        state = apply(&a_plus, &state)?;
    }
    let ratio = state.proportionality(&chain_seed(n, p), tol);
    let measured_sign = ratio.map(|r| if r < 0.0 { -1 } else { 1 });
    let printed = -p.eta.label();
    Ok(Raised {
        n,
        state,
        ratio,
        expected_magnitude: p.kappa.powi(n as i32),
        measured_sign,
        matches_printed_sign: (n > 0).then_some(()).and(measured_sign.map(|s| s == printed)),
    })
}

/// `H₁ψ_n = n(α−β)ψ_n`, `H_gψ_n = (n+1)(α−β)ψ_n` and `H₂ψ_n = √2ηκ(n+1)ψ_n`
/// for `ψ_n = A₊ⁿψ₀`, plus `|ratio| = κⁿ` against the chain seed.
pub fn verify_intertwiner_ladder(n_max: u32, p: &ModelParams, tol: f64) -> Result<Report, SpectrumError> {
    if n_max > MAX_CHAIN_DEPTH {
        return Err(SpectrumError::ChainDepthExceeded(n_max));
    }
    let alg = OperatorAlgebra::new(p);
    let gap = p.alpha - p.beta;
    let mut rep = Report::new();
    for n in 0..=n_max {
        let raised = raise_with_aplus(n, p, tol)?;
        let psi = &raised.state;
        let nf = f64::from(n);
        let tag = format!("ladder[n={n}]");
        rep.push(Check::new(format!("{tag} H1"), eigen_residual(&alg.intertwiners.h1, psi, nf * gap)?, tol));
        rep.push(Check::new(format!("{tag} Hg"), eigen_residual(&alg.hg, psi, (nf + 1.0) * gap)?, tol));
        rep.push(Check::new(
            format!("{tag} H2"),
            eigen_residual(&alg.h2, psi, SQRT_2 * p.eta.sign() * p.kappa * (nf + 1.0))?,
            tol,
        ));
        let ratio_resid = raised
            .ratio
            .map_or(f64::INFINITY, |r| (r.abs() - raised.expected_magnitude).abs() / raised.expected_magnitude);
        rep.push(Check::new(format!("{tag} |ratio|=kappa^n"), ratio_resid, tol));
    }
    Ok(rep)
}

/// `E_n = 2κ(n+1) = (n+1)(α−β)` in the `η = +1` sector.
pub fn eigenvalue_cross_check(n: u32, p: &ModelParams, tol: f64) -> Check {
    let e = eigenvalue_e(n, p);
    let expected = 2.0 * p.eta.sign() * p.kappa * f64::from(n + 1);
    Check::new(format!("E_{n} cross"), (e - expected).abs() / expected.abs().max(1.0), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub n: u32,
    pub e_n: f64,
    pub residual_h1: f64,
    pub residual_hg: f64,
}

pub fn spectrum_table(n_max: u32, p: &ModelParams) -> Result<Vec<SpectrumRow>, SpectrumError> {
    let rep = verify_intertwiner_ladder(n_max, p, f64::INFINITY)?;
    (0..=n_max)
        .map(|n| {
            let get = |what: &str| rep.get(&format!("ladder[n={n}] {what}")).map(|c| c.residual);
            Ok(SpectrumRow {
                n,
                e_n: eigenvalue_e(n, p),
                residual_h1: get("H1").unwrap_or(f64::NAN),
                residual_hg: get("Hg").unwrap_or(f64::NAN),
            })
        })
        .collect()
}
