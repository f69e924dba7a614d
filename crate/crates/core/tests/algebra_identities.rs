use respu_core::algebra::{
    explicit, identity_check, representation, representation_checks, representations, verify_identity_suite,
    HigherDerivativeChart, OperatorAlgebra,
};
use respu_core::sampling::param_samples;
use respu_core::{ModelParams, Sector, Vars, WeylOp};

#[test]
fn suite_holds_at_random_points_in_both_sectors() {
    for eta in [Sector::Plus, Sector::Minus] {
        for p in param_samples(15, 100, eta) {
            let rep = verify_identity_suite(&p, 1e-10);
            let failed: Vec<_> = rep.failures().map(|c| &c.name).collect();
            assert!(failed.is_empty(), "{p:?}: {failed:?}");
        }
    }
}

#[test]
fn both_representations_pass_the_same_checks() {
    let p = ModelParams::derive(4.2, -1.3, 1).unwrap();
    let mut names = Vec::new();
    for r in representations() {
        let rep = representation_checks(&p, &r.build(&p), 1e-10);
        assert!(rep.pass(), "{}: {:?}", r.name(), rep.failures().collect::<Vec<_>>());
        names.push(rep.checks.into_iter().map(|c| c.name).collect::<Vec<_>>());
    }
    assert_eq!(names[0], names[1]);
}

#[test]
fn pu_representation_uses_its_own_variables() {
    let p = ModelParams::derive(2.0, 1.0, 1).unwrap();
    let set = representation("pu").unwrap().build(&p);
    for op in [&set.hg, &set.k, &set.m0, &set.m_plus, &set.m_minus] {
        assert_eq!(op.vars(), Vars::QQddot);
    }
    assert!(set.hg.approx_eq(&HigherDerivativeChart::hg_expanded(&p), 1e-12));
}

#[test]
fn explicit_forms_agree_off_the_unit_gap() {
    // ν² − Ω ≠ 1 separates the two possible normalisations of M₊.
    let p = ModelParams::derive(5.5, 0.25, 1).unwrap();
    let alg = OperatorAlgebra::new(&p);
    let pairs = [
        (&alg.k, explicit::k(&p)),
        (&alg.su2.m0, explicit::m0(&p)),
        (&alg.su2.m_minus, explicit::m_minus(&p)),
        (&alg.su2.m_plus, explicit::m_plus(&p)),
    ];
    for (built, shown) in pairs {
        assert!(identity_check("explicit", built, &shown, &[], 1e-10).pass);
    }
}

#[test]
fn perturbed_ladder_breaks_the_central_relations() {
    let mut p = ModelParams::derive(3.0, 0.5, 1).unwrap();
    p.kappa *= 1.01;
    let rep = verify_identity_suite(&p, 1e-10);
    assert!(!rep.pass());
    assert!(!rep.get("[b+,a-]=k").unwrap().pass);
}

#[test]
fn casimir_eigenvalue_on_chain_seeds() {
    let p = ModelParams::derive(2.0, 1.0, 1).unwrap();
    let alg = OperatorAlgebra::new(&p);
    for m in 0..5u32 {
        let psi = respu_core::states::chain_seed(m, &p);
        let k = f64::from(m + 1);
        let out = alg.casimir.apply_to_state(&psi).unwrap();
        let expected = psi.scaled(0.25 * (k * k - 1.0));
        assert!(out.max_abs_diff(&expected).unwrap() / out.scale().max(1.0) < 1e-10);
    }
}

#[test]
fn hg_is_not_self_commuting_with_ladder() {
    let p = ModelParams::derive(2.0, 1.0, 1).unwrap();
    let alg = OperatorAlgebra::new(&p);
    assert!(!alg.hg.commutator(&alg.ladder.a_plus).is_zero());
    assert!(alg.hg.commutator(&alg.hg).is_zero());
    assert_eq!(WeylOp::zero(Vars::Xy).len(), 0);
}
