use proptest::prelude::*;
use respu_core::sampling::{random_op, rng};
use respu_core::{Multi, Poly2, Vars, WeylOp};

fn op_strategy(max_deg: u32) -> impl Strategy<Value = WeylOp> {
    prop::collection::vec(((0..=max_deg, 0..=max_deg, 0..=max_deg, 0..=max_deg), -2.0f64..2.0), 1..5).prop_map(
        move |terms| {
            WeylOp::from_terms(
                Vars::Xy,
                terms
                    .into_iter()
                    .filter(|((a, b, c, d), _)| a + b + c + d <= max_deg)
                    .map(|((a, b, c, d), k)| (Multi::new(a, b, c, d), k)),
            )
        },
    )
}

fn residual(a: &WeylOp, b: &WeylOp) -> f64 {
    a.relative_residual(b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(a in op_strategy(3), b in op_strategy(3), c in op_strategy(3)) {
        prop_assert!(residual(&(&(&a * &b) * &c), &(&a * &(&b * &c))) < 1e-12);
    }

    #[test]
    fn jacobi(a in op_strategy(3), b in op_strategy(3), c in op_strategy(3)) {
        let sum = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a)))
            + &c.commutator(&a.commutator(&b));
        let scale = (&a * &(&b * &c)).max_abs().max(1.0);
        prop_assert!(sum.max_abs() / scale < 1e-12);
    }

    #[test]
    fn leibniz(a in op_strategy(3), b in op_strategy(3), c in op_strategy(3)) {
        let lhs = a.commutator(&(&b * &c));
        let rhs = &(&a.commutator(&b) * &c) + &(&b * &a.commutator(&c));
        prop_assert!(residual(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn composition_matches_sequential_action(a in op_strategy(3), b in op_strategy(3), i in 0u32..4, j in 0u32..4) {
        let m = Poly2::monomial(i, j, 1.0);
        let direct = (&a * &b).apply_to_poly(&m);
        let seq = a.apply_to_poly(&b.apply_to_poly(&m));
        let scale = direct.max_abs().max(seq.max_abs()).max(1.0);
        prop_assert!(direct.max_abs_diff(&seq) / scale < 1e-12);
    }

    #[test]
    fn commutator_is_antisymmetric(a in op_strategy(3), b in op_strategy(3)) {
        prop_assert!(residual(&a.commutator(&b), &(-&b.commutator(&a))) < 1e-14);
    }
}

#[test]
fn seeded_oracle_degree_four_pairs() {
    let mut r = rng(2024);
    let mut worst = 0f64;
    for _ in 0..100 {
        let a = random_op(&mut r, Vars::Xy, 4, 5);
        let b = random_op(&mut r, Vars::Xy, 4, 5);
        let ab = &a * &b;
        for i in 0..=6 {
            for j in 0..=(6 - i) {
                let m = Poly2::monomial(i, j, 1.0);
                let direct = ab.apply_to_poly(&m);
                let seq = a.apply_to_poly(&b.apply_to_poly(&m));
                let scale = direct.max_abs().max(seq.max_abs()).max(1.0);
                worst = worst.max(direct.max_abs_diff(&seq) / scale);
            }
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn oracle_in_higher_derivative_chart() {
    let mut r = rng(9);
    for _ in 0..20 {
        let a = random_op(&mut r, Vars::QQddot, 3, 4);
        let b = random_op(&mut r, Vars::QQddot, 3, 4);
        let m = Poly2::from_terms([((3, 2), 1.0), ((0, 1), -2.0)]);
        let direct = (&a * &b).apply_to_poly(&m);
        let seq = a.apply_to_poly(&b.apply_to_poly(&m));
        assert!(direct.max_abs_diff(&seq) / direct.max_abs().max(1.0) < 1e-12);
    }
}

#[test]
fn mixed_charts_are_rejected() {
    let a = WeylOp::d_u(Vars::Xy);
    let b = WeylOp::d_u(Vars::QQddot);
    assert!(a.checked_compose(&b).is_err());
    assert!(a.checked_add(&b).is_err());
    assert!(a.relative_residual(&b).is_err());
}

#[test]
fn orthogonal_change_of_variables_preserves_symbol_values() {
    let (c, s) = (0.6f64, 0.8f64);
    let op = WeylOp::from_terms(
        Vars::Xy,
        [(Multi::new(0, 0, 2, 0), -1.0), (Multi::new(0, 0, 0, 2), 1.0), (Multi::new(1, 1, 0, 0), 3.0)],
    );
    let rotated = op.change_of_variables([[c, -s], [s, c]]).unwrap();
    let back = rotated.change_of_variables([[c, s], [-s, c]]).unwrap();
    assert!(back.approx_eq(&op, 1e-14));
}
