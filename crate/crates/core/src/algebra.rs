//! Builders for the named operators of the resonant model and the identity
//! suite that checks their commutation relations.
//!
//! Every generator is built twice: once from its definition as a product of
//! ladder operators, once from its closed differential-operator form. The
//! suite compares both.

use std::f64::consts::SQRT_2;

use crate::params::{ModelParams, Sector};
use crate::report::{Check, Report};
use crate::weyl::{Multi, Vars, WeylOp};

const XY: Vars = Vars::Xy;

/// `H_g = −∂x² + ∂y² + ν²x² + Ωy² − (ν²+Ω)xy`
pub fn build_hg(p: &ModelParams) -> WeylOp {
    WeylOp::from_terms(
        XY,
        [
            (Multi::new(0, 0, 2, 0), -1.0),
            (Multi::new(0, 0, 0, 2), 1.0),
            (Multi::new(2, 0, 0, 0), p.nu2),
            (Multi::new(0, 2, 0, 0), p.omega_cap),
            (Multi::new(1, 1, 0, 0), p.g),
        ],
    )
}

#[derive(Debug, Clone)]
pub struct Ladder {
    pub a_plus: WeylOp,
    pub a_minus: WeylOp,
    pub b_plus: WeylOp,
    pub b_minus: WeylOp,
}

/// `a± = ½[∂x + ∂y ± κ(y − x)]`, `b± = ½[∂x − ∂y ± (1/κ)(Ωy − ν²x)]`.
pub fn build_ladder(p: &ModelParams) -> Ladder {
    let k = p.kappa;
    let a_grad = WeylOp::gradient(XY, 0.5, 0.5);
    let a_mult = WeylOp::linear(XY, -0.5 * k, 0.5 * k);
    let b_grad = WeylOp::gradient(XY, 0.5, -0.5);
    let b_mult = WeylOp::linear(XY, -0.5 * p.nu2 / k, 0.5 * p.omega_cap / k);
    Ladder {
        a_plus: &a_grad + &a_mult,
        a_minus: &a_grad - &a_mult,
        b_plus: &b_grad + &b_mult,
        b_minus: &b_grad - &b_mult,
    }
}

#[derive(Debug, Clone)]
pub struct Bilinears {
    pub r: WeylOp,
    pub s: WeylOp,
    pub t_plus: WeylOp,
    pub t_minus: WeylOp,
}

pub fn build_bilinears(l: &Ladder) -> Bilinears {
    let ab = &l.a_plus * &l.b_minus;
    let ba = &l.b_plus * &l.a_minus;
    Bilinears {
        r: &l.a_plus * &l.a_minus,
        s: &l.b_plus * &l.b_minus,
        t_plus: &ab + &ba,
        t_minus: &ab - &ba,
    }
}

#[derive(Debug, Clone)]
pub struct Su2 {
    pub m0: WeylOp,
    pub m_plus: WeylOp,
    pub m_minus: WeylOp,
}

pub fn build_su2(p: &ModelParams, b: &Bilinears) -> Su2 {
    let (k, l) = (p.kappa, p.lambda);
    let inner = &(&b.t_plus.scale(1.0 / (2.0 * k)) - &b.s.scale(1.0 / l))
        - &b.r.scale(l / (4.0 * k * k));
    Su2 {
        m0: b.t_minus.scale(1.0 / (2.0 * k)),
        m_plus: inner.scale(1.0 / (2.0 * k)),
        m_minus: b.r.scale(-2.0 * l / k),
    }
}

/// `K = (λ/κ²)R − T⁺/κ + 1`
pub fn build_k(p: &ModelParams, b: &Bilinears) -> WeylOp {
    let (k, l) = (p.kappa, p.lambda);
    &(&b.r.scale(l / (k * k)) - &b.t_plus.scale(1.0 / k)) + &WeylOp::identity(b.r.vars())
}

/// `C = M0² + ½(M₊M₋ + M₋M₊)`
pub fn build_casimir(m: &Su2) -> WeylOp {
    let sym = &(&m.m_plus * &m.m_minus) + &(&m.m_minus * &m.m_plus);
    &(&m.m0 * &m.m0) + &sym.scale(0.5)
}

/// `H₂ = √2 κ K`
pub fn build_h2(p: &ModelParams, k: &WeylOp) -> WeylOp {
    k.scale(SQRT_2 * p.kappa)
}

#[derive(Debug, Clone)]
pub struct Intertwiners {
    pub a_plus: WeylOp,
    pub a_minus: WeylOp,
    pub h1: WeylOp,
}

pub fn build_intertwiners(p: &ModelParams) -> Intertwiners {
    let amg = p.alpha - p.gamma;
    let a_minus = &WeylOp::gradient(XY, amg, p.gamma - p.beta)
        + &WeylOp::linear(XY, 0.5 * p.gap(), -0.5 * p.gap());
    let a_plus = &WeylOp::gradient(XY, 0.5, 0.5) + &WeylOp::linear(XY, -0.5 * amg, 0.5 * amg);
    let h1 = &build_hg(p) - &WeylOp::constant(XY, p.alpha - p.beta);
    Intertwiners { a_plus, a_minus, h1 }
}

/// Every operator defined from the ladder operators in the `(x, y)` chart.
#[derive(Debug, Clone)]
pub struct OperatorAlgebra {
    pub hg: WeylOp,
    pub ladder: Ladder,
    pub bilinears: Bilinears,
    pub su2: Su2,
    pub k: WeylOp,
    pub casimir: WeylOp,
    pub h2: WeylOp,
    pub intertwiners: Intertwiners,
}

impl OperatorAlgebra {
    pub fn new(p: &ModelParams) -> Self {
        let ladder = build_ladder(p);
        let bilinears = build_bilinears(&ladder);
        let su2 = build_su2(p, &bilinears);
        let k = build_k(p, &bilinears);
        let casimir = build_casimir(&su2);
        let h2 = build_h2(p, &k);
        Self {
            hg: build_hg(p),
            ladder,
            bilinears,
            su2,
            k,
            casimir,
            h2,
            intertwiners: build_intertwiners(p),
        }
    }
}

/// Closed differential-operator forms in the `(x, y)` chart.
pub mod explicit {
    use super::*;
    use crate::poly::Poly2;

    fn chi_numerator(p: &ModelParams) -> Poly2 {
        // ν²(3x + y) − Ω(x + 3y)
        Poly2::linear(3.0 * p.nu2 - p.omega_cap, p.nu2 - 3.0 * p.omega_cap)
    }

    pub fn k(p: &ModelParams) -> WeylOp {
        let d = p.gap();
        let c2 = 1.0 / (2.0 * SQRT_2 * d.powf(1.5));
        let second = WeylOp::from_terms(
            XY,
            [
                (Multi::new(0, 0, 0, 2), (3.0 * p.nu2 - p.omega_cap) * c2),
                (Multi::new(0, 0, 1, 1), 2.0 * p.sum() * c2),
                (Multi::new(0, 0, 2, 0), -(p.nu2 - 3.0 * p.omega_cap) * c2),
            ],
        );
        let pot = chi_numerator(p)
            .mul(&Poly2::linear(1.0, -1.0))
            .scale(1.0 / (4.0 * SQRT_2 * d.sqrt()));
        &second + &WeylOp::multiply_by(XY, &pot)
    }

    pub fn m0(p: &ModelParams) -> WeylOp {
        let c = 1.0 / (4.0 * p.gap());
        let fx = Poly2::linear(p.nu2 + p.omega_cap, p.nu2 - 3.0 * p.omega_cap);
        let fy = Poly2::linear(3.0 * p.nu2 - p.omega_cap, -p.nu2 - p.omega_cap);
        let op = &WeylOp::multiply_by(XY, &fx).compose(&WeylOp::d_u(XY))
            + &WeylOp::multiply_by(XY, &fy).compose(&WeylOp::d_v(XY));
        op.scale(c)
    }

    pub fn m_minus(p: &ModelParams) -> WeylOp {
        let d = p.gap();
        let grad_sq = WeylOp::gradient(XY, 1.0, 1.0).pow(2);
        let pot = WeylOp::multiply_by(XY, &Poly2::linear(1.0, -1.0).pow(2).scale(d));
        (&grad_sq.scale(-2.0) + &pot).scale(p.sum() / (4.0 * d))
    }

    pub fn m_plus(p: &ModelParams) -> WeylOp {
        let d = p.gap();
        let root = d.sqrt();
        let grad = WeylOp::gradient(
            XY,
            (p.nu2 - 3.0 * p.omega_cap) / root,
            (p.omega_cap - 3.0 * p.nu2) / root,
        );
        let pot = WeylOp::multiply_by(XY, &chi_numerator(p).pow(2));
        (&pot - &grad.pow(2).scale(2.0)).scale(1.0 / (32.0 * d * p.sum()))
    }

    /// Symbol of `M₋` as a quadratic form in `(x, y, p_x, p_y)`, with `∂ → i p`.
    pub fn m_minus_symbol(p: &ModelParams) -> nalgebra::Matrix4<f64> {
        let c = p.sum() / (4.0 * p.gap());
        let d = p.gap();
        // c[2(p_x + p_y)² + d(x − y)²]
        nalgebra::Matrix4::new(
            c * d, -c * d, 0.0, 0.0,
            -c * d, c * d, 0.0, 0.0,
            0.0, 0.0, 2.0 * c, 2.0 * c,
            0.0, 0.0, 2.0 * c, 2.0 * c,
        )
    }
}

/// The five generators of one differential-operator representation.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub hg: WeylOp,
    pub k: WeylOp,
    pub m0: WeylOp,
    pub m_plus: WeylOp,
    pub m_minus: WeylOp,
}

/// A concrete realisation of the hidden algebra on test functions.
pub trait Representation: Send + Sync {
    fn name(&self) -> &'static str;
    fn vars(&self) -> Vars;
    fn build(&self, p: &ModelParams) -> OperatorSet;
}

/// Functions of `(x, y)`, generators built from the ladder operators.
pub struct GhostChart;

impl Representation for GhostChart {
    fn name(&self) -> &'static str {
        "xy"
    }

    fn vars(&self) -> Vars {
        XY
    }

    fn build(&self, p: &ModelParams) -> OperatorSet {
        let alg = OperatorAlgebra::new(p);
        OperatorSet {
            hg: alg.hg,
            k: alg.k,
            m0: alg.su2.m0,
            m_plus: alg.su2.m_plus,
            m_minus: alg.su2.m_minus,
        }
    }
}

/// Functions of `(q, q̈)`, generators built from `D_n^± = ∂_q ± n(ν²−Ω)∂_q̈`
/// and `q_n^± = q̈ ± n(ν²−Ω)q`.
pub struct HigherDerivativeChart;

impl HigherDerivativeChart {
    const V: Vars = Vars::QQddot;

    fn d_op(p: &ModelParams, n: f64, sign: f64) -> WeylOp {
        WeylOp::gradient(Self::V, 1.0, sign * n * p.gap())
    }

    fn q_op(p: &ModelParams, n: f64, sign: f64) -> WeylOp {
        WeylOp::linear(Self::V, sign * n * p.gap(), 1.0)
    }

    /// `∂_q∂_q̈ − 2d∂_q̈² + ½q̈² − 2d²q²` with `d = ν² − Ω`, expanded by hand.
    pub fn hg_expanded(p: &ModelParams) -> WeylOp {
        let d = p.gap();
        WeylOp::from_terms(
            Self::V,
            [
                (Multi::new(0, 0, 1, 1), 1.0),
                (Multi::new(0, 0, 0, 2), -2.0 * d),
                (Multi::new(0, 2, 0, 0), 0.5),
                (Multi::new(2, 0, 0, 0), -2.0 * d * d),
            ],
        )
    }
}

impl Representation for HigherDerivativeChart {
    fn name(&self) -> &'static str {
        "pu"
    }

    fn vars(&self) -> Vars {
        Self::V
    }

    fn build(&self, p: &ModelParams) -> OperatorSet {
        let d = p.gap();
        let dq = WeylOp::d_u(Self::V);
        let dqdd = WeylOp::d_v(Self::V);
        let d2m = Self::d_op(p, 2.0, -1.0);
        let d6p = Self::d_op(p, 6.0, 1.0);
        let q2p = Self::q_op(p, 2.0, 1.0);
        let q2m = Self::q_op(p, 2.0, -1.0);
        let q6p = Self::q_op(p, 6.0, 1.0);
        let q6m = Self::q_op(p, 6.0, -1.0);
        let inv2d = 1.0 / (2.0 * d);

        let hg = &(&d2m * &dqdd) + &(&q2p * &q2m).scale(0.5);
        let k = (&(&d6p * &d2m).scale(inv2d) + &(&q6m * &q2p))
            .scale(1.0 / (4.0 * SQRT_2 * d.sqrt()));
        let m0 = (&(&q2m * &dq).scale(inv2d) + &(&q6p * &dqdd)).scale(-0.25);
        let m_minus = (&d2m.pow(2).scale(inv2d) - &q2p.pow(2)).scale(-0.25);
        let m_plus = (&d6p.pow(2).scale(inv2d) - &q6m.pow(2)).scale(-1.0 / (32.0 * d));
        OperatorSet { hg, k, m0, m_plus, m_minus }
    }
}

/// All registered representations, in a fixed order.
pub fn representations() -> Vec<Box<dyn Representation>> {
    vec![Box::new(GhostChart), Box::new(HigherDerivativeChart)]
}

pub fn representation(name: &str) -> Option<Box<dyn Representation>> {
    representations().into_iter().find(|r| r.name() == name)
}

/// Compares `lhs` with `rhs`, scaling by the largest coefficient among
/// `lhs`, `rhs` and the operators the identity was built from.
pub fn identity_check(
    name: &str,
    lhs: &WeylOp,
    rhs: &WeylOp,
    inputs: &[&WeylOp],
    tol: f64,
) -> Check {
    let scale = inputs
        .iter()
        .map(|o| o.max_abs())
        .fold(1f64.max(lhs.max_abs()).max(rhs.max_abs()), f64::max);
    let residual = match lhs.checked_sub(rhs) {
        Ok(diff) => diff.max_abs() / scale,
        Err(_) => f64::INFINITY,
    };
    Check::new(name, residual, tol)
}

/// su(2) closure, centrality of `K`, the Casimir relation and `H_g = 2κK + M₋`
/// for one representation.
pub fn representation_checks(p: &ModelParams, set: &OperatorSet, tol: f64) -> Report {
    let id = WeylOp::identity(set.k.vars());
    let zero = WeylOp::zero(set.k.vars());
    let all = [&set.hg, &set.k, &set.m0, &set.m_plus, &set.m_minus];
    let casimir = build_casimir(&Su2 {
        m0: set.m0.clone(),
        m_plus: set.m_plus.clone(),
        m_minus: set.m_minus.clone(),
    });
    let quarter = (&(&set.k * &set.k) - &id).scale(0.25);
    let hg_split = &set.k.scale(2.0 * p.kappa) + &set.m_minus;
    [
        identity_check("[M0,M+]=M+", &set.m0.commutator(&set.m_plus), &set.m_plus, &all, tol),
        identity_check("[M0,M-]=-M-", &set.m0.commutator(&set.m_minus), &(-&set.m_minus), &all, tol),
        identity_check("[M+,M-]=2M0", &set.m_plus.commutator(&set.m_minus), &set.m0.scale(2.0), &all, tol),
        identity_check("[K,M0]=0", &set.k.commutator(&set.m0), &zero, &all, tol),
        identity_check("[K,M+]=0", &set.k.commutator(&set.m_plus), &zero, &all, tol),
        identity_check("[K,M-]=0", &set.k.commutator(&set.m_minus), &zero, &all, tol),
        identity_check("[Hg,K]=0", &set.hg.commutator(&set.k), &zero, &all, tol),
        identity_check("C=(K^2-1)/4", &casimir, &quarter, &all, tol),
        identity_check("[C,M+]=0", &casimir.commutator(&set.m_plus), &zero, &all, tol),
        identity_check("[C,M-]=0", &casimir.commutator(&set.m_minus), &zero, &all, tol),
        identity_check("Hg=2kK+M-", &set.hg, &hg_split, &all, tol),
    ]
    .into_iter()
    .collect()
}

/// Every displayed identity of the intertwiner and su(2) constructions.
pub fn verify_identity_suite(p: &ModelParams, tol: f64) -> Report {
    let alg = OperatorAlgebra::new(p);
    let Ladder { a_plus, a_minus, b_plus, b_minus } = &alg.ladder;
    let Bilinears { r, s, t_plus, t_minus } = &alg.bilinears;
    let Su2 { m0, m_plus, m_minus } = &alg.su2;
    let hg = &alg.hg;
    let (k, l) = (p.kappa, p.lambda);
    let id = WeylOp::identity(XY);
    let zero = WeylOp::zero(XY);
    let ladder = [a_plus, a_minus, b_plus, b_minus, hg];
    let bil = [r, s, t_plus, t_minus, hg];
    let gens = [m0, m_plus, m_minus, &alg.k, hg];

    let mut rep = Report::new();
    let mut add = |c: Check| rep.push(c);

    add(identity_check("[a+,a-]=0", &a_plus.commutator(a_minus), &zero, &ladder, tol));
    add(identity_check("[a+,b+]=0", &a_plus.commutator(b_plus), &zero, &ladder, tol));
    add(identity_check("[b+,a-]=k", &b_plus.commutator(a_minus), &id.scale(k), &ladder, tol));
    add(identity_check("[b-,a+]=-k", &b_minus.commutator(a_plus), &id.scale(-k), &ladder, tol));
    add(identity_check("[b+,b-]=l", &b_plus.commutator(b_minus), &id.scale(l), &ladder, tol));
    add(identity_check("[Hg,a+]=2k a+", &hg.commutator(a_plus), &a_plus.scale(2.0 * k), &ladder, tol));
    add(identity_check("[Hg,a-]=-2k a-", &hg.commutator(a_minus), &a_minus.scale(-2.0 * k), &ladder, tol));
    add(identity_check(
        "[Hg,b+]=2k b+ + 2l a+",
        &hg.commutator(b_plus),
        &(&b_plus.scale(2.0 * k) + &a_plus.scale(2.0 * l)),
        &ladder,
        tol,
    ));
    add(identity_check(
        "[Hg,b-]=-2k b- - 2l a-",
        &hg.commutator(b_minus),
        &(&b_minus.scale(-2.0 * k) + &a_minus.scale(-2.0 * l)),
        &ladder,
        tol,
    ));

    add(identity_check("[T+,T-]=2l R", &t_plus.commutator(t_minus), &r.scale(2.0 * l), &bil, tol));
    add(identity_check("[R,S]=-k T-", &r.commutator(s), &t_minus.scale(-k), &bil, tol));
    add(identity_check("[R,T-]=2k R", &r.commutator(t_minus), &r.scale(2.0 * k), &bil, tol));
    add(identity_check(
        "[S,T-]=l T+ - 2k S",
        &s.commutator(t_minus),
        &(&t_plus.scale(l) - &s.scale(2.0 * k)),
        &bil,
        tol,
    ));
    add(identity_check("[T+,R]=0", &t_plus.commutator(r), &zero, &bil, tol));
    add(identity_check("[Hg,R]=0", &hg.commutator(r), &zero, &bil, tol));
    add(identity_check("[Hg,T+]=0", &hg.commutator(t_plus), &zero, &bil, tol));
    add(identity_check("[Hg,S]=2l T-", &hg.commutator(s), &t_minus.scale(2.0 * l), &bil, tol));
    add(identity_check("[Hg,T-]=-4l R", &hg.commutator(t_minus), &r.scale(-4.0 * l), &bil, tol));

    add(identity_check("explicit K", &alg.k, &explicit::k(p), &gens, tol));
    add(identity_check("explicit M0", m0, &explicit::m0(p), &gens, tol));
    add(identity_check("explicit M-", m_minus, &explicit::m_minus(p), &gens, tol));
    add(identity_check("explicit M+", m_plus, &explicit::m_plus(p), &gens, tol));

    add(identity_check("[H2,M0]=0", &alg.h2.commutator(m0), &zero, &gens, tol));
    add(identity_check("[H2,M+]=0", &alg.h2.commutator(m_plus), &zero, &gens, tol));
    add(identity_check("[H2,M-]=0", &alg.h2.commutator(m_minus), &zero, &gens, tol));

    let tw = &alg.intertwiners;
    let tw_ops = [&tw.a_plus, &tw.a_minus, &tw.h1, hg];
    add(identity_check("A- H1 = Hg A-", &(&tw.a_minus * &tw.h1), &(hg * &tw.a_minus), &tw_ops, tol));
    add(identity_check("H1 A+ = A+ Hg", &(&tw.h1 * &tw.a_plus), &(&tw.a_plus * hg), &tw_ops, tol));
    add(identity_check("[A+,A-]=0", &tw.a_plus.commutator(&tw.a_minus), &zero, &tw_ops, tol));
    let matching = match p.eta {
        Sector::Plus => a_plus,
        Sector::Minus => a_minus,
    };
    add(identity_check("A+ = a^eta", &tw.a_plus, matching, &tw_ops, tol));

    add(identity_check(
        "rep[pu] Hg expansion",
        &HigherDerivativeChart.build(p).hg,
        &HigherDerivativeChart::hg_expanded(p),
        &[],
        tol,
    ));
    for repr in representations() {
        let set = repr.build(p);
        let prefix = format!("rep[{}] ", repr.name());
        for c in representation_checks(p, &set, tol).checks {
            add(c.prefixed(&prefix));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{chain_seed, ground_state};

    fn params() -> ModelParams {
        ModelParams::derive(2.0, 1.0, 1).unwrap()
    }

    #[test]
    fn hg_coefficients() {
        let hg = build_hg(&params());
        assert_eq!(hg.coeff(Multi::new(1, 1, 0, 0)), -3.0);
        assert_eq!(hg.len(), 5);
        assert!(hg.commutator(&hg).is_zero());
    }

    #[test]
    fn b_commutator_is_lambda() {
        let l = build_ladder(&params());
        let c = l.b_plus.commutator(&l.b_minus);
        assert!(c.approx_eq(&WeylOp::constant(XY, 2.1213203435596424), 1e-14));
    }

    #[test]
    fn reference_suite_passes() {
        let rep = verify_identity_suite(&params(), 1e-10);
        let failed: Vec<_> = rep.failures().map(|c| c.name.clone()).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(rep.checks.len() >= 50);
    }

    #[test]
    fn perturbed_kappa_is_caught() {
        let mut p = params();
        p.kappa *= 1.01;
        let rep = verify_identity_suite(&p, 1e-10);
        assert!(!rep.get("[b+,a-]=k").unwrap().pass);
        assert!(!rep.get("[b-,a+]=-k").unwrap().pass);
    }

    #[test]
    fn k_and_casimir_on_ground_state() {
        let p = params();
        let alg = OperatorAlgebra::new(&p);
        let psi = ground_state(&p);
        let kpsi = alg.k.apply_to_state(&psi).unwrap();
        assert!(kpsi.max_abs_diff(&psi).unwrap() < 1e-12);
        let cpsi = alg.casimir.apply_to_state(&psi).unwrap();
        assert!(cpsi.is_zero(1e-12));
    }

    #[test]
    fn hg_eigenvalue_and_annihilation_on_ground_state() {
        let p = params();
        let alg = OperatorAlgebra::new(&p);
        let psi = ground_state(&p);
        let h = alg.hg.apply_to_state(&psi).unwrap();
        assert!(h.max_abs_diff(&psi.scaled(p.alpha - p.beta)).unwrap() < 1e-12);
        assert!(alg.intertwiners.a_minus.apply_to_state(&psi).unwrap().is_zero(1e-12));
        assert!(alg.su2.m_minus.apply_to_state(&psi).unwrap().is_zero(1e-12));
    }

    #[test]
    fn a_plus_on_ground_state() {
        let p = params();
        let tw = build_intertwiners(&p);
        let out = tw.a_plus.apply_to_state(&ground_state(&p)).unwrap();
        let ratio = out.proportionality(&chain_seed(1, &p), 1e-12).unwrap();
        assert!((ratio + p.kappa).abs() < 1e-14);
    }

    #[test]
    fn m_minus_explicit_at_reference_point() {
        // (3/4)[−2(∂y² + 2∂x∂y + ∂x²) + (x−y)²]
        let m = explicit::m_minus(&params());
        assert!((m.coeff(Multi::new(0, 0, 2, 0)) + 1.5).abs() < 1e-15);
        assert!((m.coeff(Multi::new(0, 0, 1, 1)) + 3.0).abs() < 1e-15);
        assert!((m.coeff(Multi::new(1, 1, 0, 0)) + 1.5).abs() < 1e-15);
        assert!((m.coeff(Multi::new(2, 0, 0, 0)) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn m_minus_symbol_sign_follows_coupling() {
        let eig = |p: &ModelParams| explicit::m_minus_symbol(p).symmetric_eigenvalues();
        let pos = eig(&params());
        assert!(pos.iter().all(|&e| e > -1e-12) && pos.max() > 0.0);
        // ν² + Ω < 0 flips the overall prefactor
        let neg = eig(&ModelParams::derive(-1.5, -2.0, 1).unwrap());
        assert!(neg.iter().all(|&e| e < 1e-12) && neg.min() < 0.0);
    }

    #[test]
    fn representation_registry() {
        let names: Vec<_> = representations().iter().map(|r| r.name()).collect();
        assert_eq!(names, ["xy", "pu"]);
        assert_eq!(representation("pu").unwrap().vars(), Vars::QQddot);
        assert!(representation("bogus").is_none());
    }

    #[test]
    fn sector_minus_suite_passes() {
        let p = ModelParams::derive(3.5, -0.7, -1).unwrap();
        let rep = verify_identity_suite(&p, 1e-10);
        assert!(rep.pass(), "{:?}", rep.failures().collect::<Vec<_>>());
    }
}
