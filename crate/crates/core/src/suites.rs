//! Named verification suites, one per module, resolvable by name.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::verify_identity_suite;
use crate::classical::{
    self, build_hg_classical, build_jg, build_j2, build_mp_mv, canonical_flow, conserved_q, conserved_q_pu,
    ep_closed, ev_closed, flow_field, jordan_structure, sym_eigenvalues, vec_of, ClassicalError,
    CombinedPair, FlowStructure, SecondStructure,
};
use crate::factorization::{verify_factorization, FactorError};
use crate::params::{hg_value, hpu_value, pu_frequencies, pu_from_ghost, ModelParams, ParamError, PhaseState};
use crate::report::{Check, Report};
use crate::sampling;
use crate::spectrum::{self, SpectrumError};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("unknown suite {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Factor(#[from] FactorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub params: ModelParams,
    pub tol: f64,
    pub seed: u64,
    pub k_max: u32,
    pub n_max: u32,
    pub t_max: f64,
    pub dt: f64,
}

impl SuiteConfig {
    pub fn new(params: ModelParams) -> Self {
        Self { params, tol: 1e-10, seed: 42, k_max: 8, n_max: 8, t_max: 10.0, dt: 1e-3 }
    }
}

pub trait VerificationSuite: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, cfg: &SuiteConfig) -> Result<Report, SuiteError>;
}

fn random_state<R: Rng + ?Sized>(rng: &mut R) -> PhaseState {
    PhaseState::from_array(std::array::from_fn(|_| rng.random_range(-2.0..2.0)))
}

/// Derived-constant identities, non-normalisability and the PU map.
pub struct ParamsSuite;

impl VerificationSuite for ParamsSuite {
    fn name(&self) -> &'static str {
        "params"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
        let p = &cfg.params;
        let (tol, e) = (cfg.tol, p.eta.sign());
        let scale = p.alpha.abs().max(p.beta.abs()).max(p.gamma.abs()).max(1.0);
        let rel = |a: f64, b: f64| (a - b).abs() / scale;
        let mut rep = Report::from_iter([
            Check::new("alpha-beta = 2 eta kappa", rel(p.alpha - p.beta, 2.0 * e * p.kappa), tol),
            Check::new("alpha-gamma = eta kappa", rel(p.alpha - p.gamma, e * p.kappa), tol),
            Check::new("gamma-beta = eta kappa", rel(p.gamma - p.beta, e * p.kappa), tol),
            Check::new(
                "alpha beta - gamma^2 = (W-n2)/2",
                (p.alpha * p.beta - p.gamma * p.gamma - 0.5 * (p.omega_cap - p.nu2)).abs() / (scale * scale),
                tol,
            ),
            Check::claim("ground state not normalizable", !p.ground_state_normalizable()),
        ]);
        let (w1, w2) = pu_frequencies(p.nu2, p.omega_cap, p.g)?;
        rep.push(Check::new("omega1 = omega2", (w1 - w2).abs(), tol));
        rep.push(Check::new("omega = 2 kappa", (w1 - p.omega).abs() / p.omega.max(1.0), tol));
        if p.sum() > 0.0 {
            let mut rng = sampling::rng(cfg.seed);
            let mut worst = 0f64;
            for _ in 0..1000 {
                let z = random_state(&mut rng);
                let h = hg_value(z, p);
                worst = worst.max((hpu_value(pu_from_ghost(z, p)?, p) - h).abs() / h.abs().max(1.0));
            }
            rep.push(Check::new("Hpu o map = Hg", worst, tol));
        }
        Ok(rep)
    }
}

/// Operator identities in both representations.
pub struct AlgebraSuite;

impl VerificationSuite for AlgebraSuite {
    fn name(&self) -> &'static str {
        "algebra"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
        Ok(verify_identity_suite(&cfg.params, cfg.tol))
    }
}

/// Jordan chains, sector actions and the intertwiner ladder.
pub struct SpectrumSuite;

impl VerificationSuite for SpectrumSuite {
    fn name(&self) -> &'static str {
        "spectrum"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
        let p = &cfg.params;
        let mut rep = Report::new();
        for k in 1..=cfg.k_max {
            rep.extend(spectrum::build_chain(k, p, cfg.tol)?.to_report());
        }
        for m in 0..=cfg.k_max {
            rep.extend(spectrum::verify_sector_actions(m, p, cfg.tol)?);
        }
        if p.eta == crate::params::Sector::Plus {
            for k in 1..=4 {
                rep.extend(spectrum::verify_mplus_explicit(k, p, cfg.tol)?);
            }
            for n in 0..=cfg.n_max {
                rep.push(spectrum::eigenvalue_cross_check(n, p, cfg.tol));
            }
        }
        rep.extend(spectrum::verify_intertwiner_ladder(cfg.n_max, p, cfg.tol)?);
        Ok(rep)
    }
}

/// Bi-Hamiltonian flows, the propagator, `M_p`/`M_v` and `Q`.
pub struct ClassicalSuite;

impl VerificationSuite for ClassicalSuite {
    fn name(&self) -> &'static str {
        "classical"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
        let p = &cfg.params;
        let tol = cfg.tol;
        let mut rng = sampling::rng(cfg.seed);
        let canonical = canonical_flow(p);
        let second = SecondStructure.flow(p);
        let mut rep = Report::new();

        let (mut pair_resid, mut combined_resid) = (0f64, 0f64);
        let (mut block_resid, mut ep_resid, mut ev_resid) = (0f64, 0f64, 0f64);
        for _ in 0..100 {
            let z = vec_of(random_state(&mut rng));
            let truth = canonical.field(&z);
            let norm = z.amax().max(f64::MIN_POSITIVE);
            pair_resid = pair_resid.max((second.field(&z) - truth).amax() / norm);
            let (c1, c2) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let Ok(pair) = CombinedPair::new(c1, c2) else { continue };
            let bar = pair.flow(p);
            combined_resid = combined_resid.max((bar.field(&z) - truth).amax() / norm);
            let (mp, mv) = build_mp_mv(c1, c2, p)?;
            let scale = bar.h.0.amax().max(1.0);
            block_resid = block_resid
                .max((mp - bar.h.kinetic_block()).amax() / scale)
                .max((mv - bar.h.potential_block()).amax() / scale);
            let (ep, ev) = (ep_closed(c1, c2, p)?, ev_closed(c1, c2, p)?);
            let (np, nv) = (sym_eigenvalues(&mp), sym_eigenvalues(&mv));
            let escale = |e: [f64; 2]| e[0].abs().max(e[1].abs()).max(1.0);
            ep_resid = ep_resid.max((ep[0] - np[0]).abs().max((ep[1] - np[1]).abs()) / escale(np));
            ev_resid = ev_resid.max((ev[0] - nv[0]).abs().max((ev[1] - nv[1]).abs()) / escale(nv));
        }
        rep.push(Check::new("Jg dHg = J2 dH2", pair_resid, tol));
        rep.push(Check::new("combined flow", combined_resid, tol));
        rep.push(Check::new("Mp/Mv blocks", block_resid, tol));
        rep.push(Check::new("Ep closed form", ep_resid, tol));
        rep.push(Check::new("Ev closed form", ev_resid, tol));
        rep.push(Check::claim(
            "forbidden ray rejected",
            matches!(CombinedPair::new(std::f64::consts::SQRT_2, -1.0), Err(ClassicalError::ForbiddenRay(..))),
        ));

        let (_, jordan) = jordan_structure(p, tol);
        rep.extend(jordan);

        let z0 = PhaseState::new(0.7, -0.4, 0.3, 0.5);
        let traj = classical::integrate(&canonical, z0, cfg.t_max, cfg.dt)?;
        let summary = classical::summarize(&traj, p);
        rep.push(Check::new("RK4 vs exact", summary.max_exact_error, 1e-6));
        rep.push(Check::new("H drift", summary.max_h_drift, 1e-8));
        rep.push(Check::new("Q drift", summary.max_q_drift, 1e-8));

        if p.sum() > 0.0 {
            let mut q_resid = 0f64;
            for _ in 0..100 {
                let z = random_state(&mut rng);
                let q = conserved_q(z, p);
                q_resid = q_resid.max((conserved_q_pu(pu_from_ghost(z, p)?, p) - q).abs() / q.abs().max(1.0));
            }
            rep.push(Check::new("Q xy = Q pu", q_resid, tol));
            let series = classical::q_series(z0, p, cfg.t_max, 400)?;
            let fit = classical::secular_fit(&series, p.omega);
            rep.push(Check::new("q(t) secular fit", fit.residual, 1e-9));
            rep.push(Check::claim("q(t) secular growth", fit.secular_amplitude > 1e-8));
        }
        let zq = PhaseState::new(0.9, 0.2, -0.3, 0.6);
        rep.push(Check::claim("Q not Hamiltonian for Jg", classical::q_flow_mismatch(&build_jg(), p, zq) > 1e-6));
        rep.push(Check::claim("Q not Hamiltonian for J2", classical::q_flow_mismatch(&build_j2(p), p, zq) > 1e-6));
        let reference = flow_field(&build_jg(), &build_hg_classical(p), PhaseState::new(1.0, 0.0, 0.0, 0.0));
        rep.push(Check::claim("flow at e_x finite", reference.iter().all(|v| v.is_finite())));
        Ok(rep)
    }
}

/// Quadratic-form diagonalisation and the effective Hamiltonian.
pub struct FactorizationSuite;

impl VerificationSuite for FactorizationSuite {
    fn name(&self) -> &'static str {
        "factorization"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Report, SuiteError> {
        let mut rng = sampling::rng(cfg.seed);
        Ok(verify_factorization(&cfg.params, cfg.tol.max(1e-12), &mut rng)?)
    }
}

pub fn suites() -> Vec<Box<dyn VerificationSuite>> {
    vec![
        Box::new(ParamsSuite),
        Box::new(AlgebraSuite),
        Box::new(SpectrumSuite),
        Box::new(ClassicalSuite),
        Box::new(FactorizationSuite),
    ]
}

/// `"all"` or a comma-separated list of suite names.
pub fn select(spec: &str) -> Result<Vec<Box<dyn VerificationSuite>>, SuiteError> {
    if spec == "all" {
        return Ok(suites());
    }
    spec.split(',')
        .map(|name| {
            suites()
                .into_iter()
                .find(|s| s.name() == name.trim())
                .ok_or_else(|| SuiteError::Unknown(name.to_string()))
        })
        .collect()
}

/// Runs each suite and prefixes its checks with the suite name.
pub fn run_all(selected: &[Box<dyn VerificationSuite>], cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let mut rep = Report::new();
    for suite in selected {
        let prefix = format!("{}: ", suite.name());
        rep.extend(suite.run(cfg)?.checks.into_iter().map(|c| c.prefixed(&prefix)).collect());
    }
    Ok(rep)
}
