//! Factorisation of the formal ground state into two one-dimensional
//! Gaussians and the effective Hamiltonian of the non-normalisable mode.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::build_hg;
use crate::params::{hg_value, ModelParams, PhaseState, Sector};
use crate::poly::Poly2;
use crate::report::{Check, Report};
use crate::sampling;
use crate::states::{GaussPolyState, Gaussian};
use crate::weyl::{Multi, Vars, WeylError, WeylOp};

const SPLIT_GUARD: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error("eigenvalues of the quadratic form coincide (split {0})")]
    DegenerateEigenvalues(f64),
    #[error("Gaussian weight exp(−{0}x²) is not integrable")]
    NonNormalizable(f64),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

/// `M = [[α, −γ], [−γ, β]]`, so that `ψ₀ = exp(−½ xᵀMx)`.
pub fn quad_form_matrix(p: &ModelParams) -> Matrix2<f64> {
    Matrix2::new(p.alpha, -p.gamma, -p.gamma, p.beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagonalization {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub v_plus: [f64; 2],
    pub v_minus: [f64; 2],
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// Rows `v₊`, `v₋`; `x̃ = U x`.
    pub u: [[f64; 2]; 2],
}

impl Diagonalization {
    pub fn u_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.u[0][0], self.u[0][1], self.u[1][0], self.u[1][1])
    }

    pub fn split(&self) -> f64 {
        self.lambda_plus - self.lambda_minus
    }
}

/// Closed-form eigen-data of `M`. The second component of `v±` is
/// `1/(√2ρ±) > 0`.
pub fn diagonalize_form(m: &Matrix2<f64>) -> Result<Diagonalization, FactorError> {
    let (alpha, beta, gamma) = (m[(0, 0)], m[(1, 1)], -m[(0, 1)]);
    let split = ((alpha - beta).powi(2) + 4.0 * gamma * gamma).sqrt();
    if split < SPLIT_GUARD * (alpha.abs() + beta.abs() + 1.0) {
        return Err(FactorError::DegenerateEigenvalues(split));
    }
    let rho = |sign: f64| (split / (sign * (beta - alpha) + split)).sqrt();
    let vec = |sign: f64, r: f64| [-sign * SQRT_2 * gamma * r / split, 1.0 / (SQRT_2 * r)];
    let (rho_plus, rho_minus) = (rho(1.0), rho(-1.0));
    let v_plus = vec(1.0, rho_plus);
    let v_minus = vec(-1.0, rho_minus);
    Ok(Diagonalization {
        lambda_plus: 0.5 * (alpha + beta + split),
        lambda_minus: 0.5 * (alpha + beta - split),
        v_plus,
        v_minus,
        rho_plus,
        rho_minus,
        u: [v_plus, v_minus],
    })
}

/// Coefficients of `H_g` in the rotated variables, with `p = −i∂`:
/// `H = Σ kinetic_ij p̃_i p̃_j + Σ potential_ij x̃_i x̃_j`, cross entries
/// holding the full coefficient of the mixed monomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformedHamiltonian {
    pub kinetic_pp: f64,
    pub kinetic_mm: f64,
    pub kinetic_pm: f64,
    pub potential_pp: f64,
    pub potential_mm: f64,
    pub potential_pm: f64,
}

impl TransformedHamiltonian {
    pub fn kinetic_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.kinetic_pp, 0.5 * self.kinetic_pm, 0.5 * self.kinetic_pm, self.kinetic_mm)
    }

    pub fn potential_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.potential_pp, 0.5 * self.potential_pm, 0.5 * self.potential_pm, self.potential_mm)
    }

    pub fn value(&self, x: Vector2<f64>, px: Vector2<f64>) -> f64 {
        px.dot(&(self.kinetic_matrix() * px)) + x.dot(&(self.potential_matrix() * x))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.kinetic_pp - other.kinetic_pp,
            self.kinetic_mm - other.kinetic_mm,
            self.kinetic_pm - other.kinetic_pm,
            self.potential_pp - other.potential_pp,
            self.potential_mm - other.potential_mm,
            self.potential_pm - other.potential_pm,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// `H_g` rewritten in `x̃ = U x` as an operator on `(x̃₊, x̃₋)`.
pub fn transformed_operator(p: &ModelParams) -> Result<(WeylOp, Diagonalization), FactorError> {
    let diag = diagonalize_form(&quad_form_matrix(p))?;
    Ok((build_hg(p).change_of_variables(diag.u)?, diag))
}

/// Reads the rotated coefficients off the substituted operator.
pub fn transformed_hamiltonian(p: &ModelParams) -> Result<TransformedHamiltonian, FactorError> {
    let (op, _) = transformed_operator(p)?;
    let c = |a, b, da, db| op.coeff(Multi::new(a, b, da, db));
    Ok(TransformedHamiltonian {
        kinetic_pp: -c(0, 0, 2, 0),
        kinetic_mm: -c(0, 0, 0, 2),
        kinetic_pm: -c(0, 0, 1, 1),
        potential_pp: c(2, 0, 0, 0),
        potential_mm: c(0, 2, 0, 0),
        potential_pm: c(1, 1, 0, 0),
    })
}

/// The printed closed form of the rotated Hamiltonian.
pub fn transformed_hamiltonian_display(p: &ModelParams) -> Result<TransformedHamiltonian, FactorError> {
    let diag = diagonalize_form(&quad_form_matrix(p))?;
    let split = diag.split();
    let amb = p.alpha - p.beta;
    let rr = diag.rho_plus * diag.rho_minus;
    let diff = (p.gap() * amb - 2.0 * p.g * p.gamma) / (2.0 * split);
    let half_sum = 0.5 * p.sum();
    Ok(TransformedHamiltonian {
        kinetic_pp: amb / split,
        kinetic_mm: -amb / split,
        kinetic_pm: -2.0 / rr,
        potential_pp: diff + half_sum,
        potential_mm: -diff + half_sum,
        potential_pm: (p.g * (p.beta - p.alpha) + 2.0 * (p.omega_cap - p.nu2) * p.gamma) / (2.0 * p.gamma * rr),
    })
}

/// `∫ xⁿ e^{−λx²} dx = Γ((n+1)/2) / λ^{(n+1)/2}`, zero for odd `n`.
pub fn gaussian_moment(lam: f64, n: u32) -> Result<f64, FactorError> {
    if lam.is_nan() || lam <= 0.0 {
        return Err(FactorError::NonNormalizable(lam));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    // Γ(k + ½) = √π (2k−1)!! / 2^k
    let k = n / 2;
    let gamma = (1..=k).fold(PI.sqrt(), |g, j| g * (f64::from(j) - 0.5));
    Ok(gamma / lam.powf(f64::from(n) / 2.0 + 0.5))
}

/// `H_eff = a₁p̃₋² + a₂x̃₋² + a₃` obtained by applying the rotated `H_g` to
/// `φ₀⁺φ₀⁻`, multiplying by `φ₀⁺` and integrating over `x̃₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffectiveHamiltonian {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

pub fn effective_hamiltonian(p: &ModelParams) -> Result<EffectiveHamiltonian, FactorError> {
    let th = transformed_hamiltonian(p)?;
    let diag = diagonalize_form(&quad_form_matrix(p))?;
    let lp = diag.lambda_plus;
    let m0 = gaussian_moment(lp, 0)?;
    let m2 = gaussian_moment(lp, 2)?;
    Ok(EffectiveHamiltonian {
        a1: th.kinetic_mm * m0,
        a2: th.potential_mm * m0,
        a3: th.kinetic_pp * (lp * m0 - lp * lp * m2) + th.potential_pp * m2,
    })
}

/// Projects `H φ₀⁺φ₀⁻` through the state machinery and compares it with
/// `(a₁p̃₋² + a₂x̃₋² + a₃)φ₀⁻`. Returns the largest coefficient mismatch.
pub fn effective_hamiltonian_double_entry(p: &ModelParams) -> Result<f64, FactorError> {
    let (op, diag) = transformed_operator(p)?;
    let (lp, lm) = (diag.lambda_plus, diag.lambda_minus);
    let psi = GaussPolyState::new(Vars::Xy, Poly2::constant(1.0), Gaussian::new(lp, lm, 0.0));
    let out = op.apply_to_state(&psi)?;
    let mut projected = [0.0; 3];
    for ((a, b), c) in out.poly().terms() {
        if b <= 2 {
            projected[b as usize] += c * gaussian_moment(lp, a)?;
        }
    }
    let eff = effective_hamiltonian(p)?;
    let predicted = [eff.a1 * lm + eff.a3, 0.0, eff.a2 - eff.a1 * lm * lm];
    let scale = predicted.iter().chain(&projected).fold(1f64, |m, v| m.max(v.abs()));
    Ok(predicted.iter().zip(&projected).fold(0f64, |m, (x, y)| m.max((x - y).abs())) / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationResult {
    pub m: [[f64; 2]; 2],
    pub diag: Diagonalization,
    pub transformed: TransformedHamiltonian,
    pub effective: Option<EffectiveHamiltonian>,
    pub lambda_plus_positive: bool,
}

pub fn factorize(p: &ModelParams) -> Result<FactorizationResult, FactorError> {
    let m = quad_form_matrix(p);
    let diag = diagonalize_form(&m)?;
    let effective = match effective_hamiltonian(p) {
        Ok(e) => Some(e),
        Err(FactorError::NonNormalizable(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(FactorizationResult {
        m: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
        diag,
        transformed: transformed_hamiltonian(p)?,
        effective,
        lambda_plus_positive: diag.lambda_plus > 0.0,
    })
}

/// Named checks of the factorisation at one parameter point.
pub fn verify_factorization<R: Rng + ?Sized>(p: &ModelParams, tol: f64, rng: &mut R) -> Result<Report, FactorError> {
    let m = quad_form_matrix(p);
    let diag = diagonalize_form(&m)?;
    let u = diag.u_matrix();
    let scale = m.abs().max().max(1.0);
    let mut rep = Report::new();

    let numeric = SymmetricEigen::new(m).eigenvalues;
    let eig_resid = (diag.lambda_plus - numeric.max()).abs().max((diag.lambda_minus - numeric.min()).abs());
    rep.push(Check::new("lambda closed form", eig_resid / scale, tol));
    let vp = Vector2::from(diag.v_plus);
    let vm = Vector2::from(diag.v_minus);
    let evec = (m * vp - diag.lambda_plus * vp).amax().max((m * vm - diag.lambda_minus * vm).amax());
    rep.push(Check::new("M v = lambda v", evec / scale, tol));
    rep.push(Check::new("U U^T = 1", (u * u.transpose() - Matrix2::identity()).amax(), tol));
    let rotated = u * m * u.transpose() - Matrix2::new(diag.lambda_plus, 0.0, 0.0, diag.lambda_minus);
    rep.push(Check::new("U M U^T diagonal", rotated.amax() / scale, tol));
    let det = diag.lambda_plus * diag.lambda_minus;
    rep.push(Check::new("lambda+ lambda- = (W-n2)/2", (det - 0.5 * (p.omega_cap - p.nu2)).abs() / scale, tol));
    rep.push(Check::claim("lambda- < 0", diag.lambda_minus < 0.0));

    let th = transformed_hamiltonian(p)?;
    let display = transformed_hamiltonian_display(p)?;
    let th_scale = th.kinetic_matrix().amax().max(th.potential_matrix().amax()).max(1.0);
    rep.push(Check::new("transformed vs display", th.max_abs_diff(&display) / th_scale, tol));
    rep.push(Check::new("kinetic trace", (th.kinetic_pp + th.kinetic_mm).abs(), tol));
    let v = crate::classical::build_hg_classical(p).potential_block();
    let v_eig = SymmetricEigen::new(v).eigenvalues;
    let t_eig = SymmetricEigen::new(th.potential_matrix()).eigenvalues;
    let inv = (v_eig.max() - t_eig.max()).abs().max((v_eig.min() - t_eig.min()).abs());
    rep.push(Check::new("potential invariants", inv / v.amax().max(1.0), tol));
    let mut subst = 0f64;
    for _ in 0..100 {
        let z: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let x = u * Vector2::new(z[0], z[1]);
        let px = u * Vector2::new(z[2], z[3]);
        let h = hg_value(PhaseState::from_array(z), p);
        subst = subst.max((th.value(x, px) - h).abs() / h.abs().max(1.0));
    }
    rep.push(Check::new("substitution identity", subst, tol));

    if diag.lambda_plus > 0.0 {
        let eff = effective_hamiltonian(p)?;
        rep.push(Check::new("effective double entry", effective_hamiltonian_double_entry(p)?, tol));
        if p.eta == Sector::Plus {
            rep.push(Check::claim("a1 < 0", eff.a1 < 0.0));
            rep.push(Check::claim("a2 < 0", eff.a2 < 0.0));
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionRow {
    pub nu2: f64,
    pub omega_cap: f64,
    pub eta: i32,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub a3: Option<f64>,
    pub normalizable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaScan {
    pub samples: usize,
    pub seed: u64,
    pub fraction_lambda_plus_positive: f64,
    pub lambda_minus_negative_everywhere: bool,
    /// `λ₊λ₋ < 0` at every sample.
    pub determinant_negative_everywhere: bool,
    /// The five samples with the smallest `λ₊`.
    pub boundary: Vec<RegionRow>,
    pub rows: Vec<RegionRow>,
}

/// Samples `(ν², Ω)` and `η = ±1` and tabulates `λ±` and `a₁, a₂, a₃`.
pub fn lambda_region_scan(samples: usize, seed: u64) -> Result<LambdaScan, FactorError> {
    let mut rng = sampling::rng(seed);
    let params: Vec<ModelParams> = (0..samples)
        .map(|_| {
            let eta = if rng.random_bool(0.5) { Sector::Plus } else { Sector::Minus };
            sampling::sample_params(&mut rng, eta)
        })
        .collect();
    let rows = params
        .par_iter()
        .map(|p| {
            let diag = diagonalize_form(&quad_form_matrix(p))?;
            let eff = effective_hamiltonian(p).ok();
            Ok(RegionRow {
                nu2: p.nu2,
                omega_cap: p.omega_cap,
                eta: p.eta.label(),
                lambda_plus: diag.lambda_plus,
                lambda_minus: diag.lambda_minus,
                a1: eff.map(|e| e.a1),
                a2: eff.map(|e| e.a2),
                a3: eff.map(|e| e.a3),
                normalizable: diag.lambda_plus > 0.0,
            })
        })
        .collect::<Result<Vec<_>, FactorError>>()?;
    let positive = rows.iter().filter(|r| r.normalizable).count();
    let mut boundary = rows.clone();
    boundary.sort_by(|a, b| a.lambda_plus.total_cmp(&b.lambda_plus));
    boundary.truncate(5);
    Ok(LambdaScan {
        samples,
        seed,
        fraction_lambda_plus_positive: positive as f64 / samples.max(1) as f64,
        lambda_minus_negative_everywhere: rows.iter().all(|r| r.lambda_minus < 0.0),
        determinant_negative_everywhere: rows.iter().all(|r| r.lambda_plus * r.lambda_minus < 0.0),
        boundary,
        rows,
    })
}
