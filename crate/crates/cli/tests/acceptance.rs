//! End-to-end acceptance criteria. Run with `--nocapture` to see one line per
//! criterion.

use std::process::Command;

use rand::Rng;
use respu_core::algebra::{representation_checks, representations, verify_identity_suite};
use respu_core::classical::{
    build_mp_mv, canonical_flow, definiteness_scan, ep_closed, ev_closed, integrate, jordan_structure,
    resolve_structure, summarize, sym_eigenvalues, vec_of, CombinedPair,
};
use respu_core::factorization::{
    diagonalize_form, effective_hamiltonian, effective_hamiltonian_double_entry, gaussian_moment,
    quad_form_matrix, transformed_hamiltonian, transformed_hamiltonian_display,
};
use respu_core::params::{hg_value, hpu_value, pu_frequencies, pu_from_ghost};
use respu_core::sampling::{param_samples, random_op, rng, sample_params_positive};
use respu_core::spectrum::{
    build_chain, eigenvalue_cross_check, eigenvalue_e, raise_with_aplus, verify_intertwiner_ladder,
    verify_sector_actions,
};
use respu_core::{PhaseState, Poly2, Sector, Vars, WeylOp};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn random_state(r: &mut impl Rng) -> PhaseState {
    PhaseState::from_array(std::array::from_fn(|_| r.random_range(-3.0..3.0)))
}

fn criterion_1() -> Outcome {
    let mut checks = 0;
    let mut worst = 0f64;
    let mut failed = Vec::new();
    for (eta, seed) in [(Sector::Plus, 101), (Sector::Minus, 102)] {
        for p in param_samples(100, seed, eta) {
            let mut rep = verify_identity_suite(&p, 1e-10);
            for r in representations() {
                rep.extend(representation_checks(&p, &r.build(&p), 1e-10));
            }
            checks += rep.checks.len();
            worst = worst.max(rep.max_residual());
            failed.extend(rep.failures().map(|c| c.name.clone()));
        }
    }
    Outcome::new(failed.is_empty(), format!("{checks} checks, max residual {worst:.2e}, failed {failed:?}"))
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut oracle = 0f64;
    for _ in 0..500 {
        let a = random_op(&mut r, Vars::Xy, 4, 5);
        let b = random_op(&mut r, Vars::Xy, 4, 5);
        let ab = &a * &b;
        for i in 0..=6 {
            for j in 0..=(6 - i) {
                let m = Poly2::monomial(i, j, 1.0);
                let direct = ab.apply_to_poly(&m);
                let seq = a.apply_to_poly(&b.apply_to_poly(&m));
                oracle = oracle.max(direct.max_abs_diff(&seq) / direct.max_abs().max(seq.max_abs()).max(1.0));
            }
        }
    }
    let mut jacobi = 0f64;
    let mut leibniz = 0f64;
    for _ in 0..100 {
        let [a, b, c]: [WeylOp; 3] = std::array::from_fn(|_| random_op(&mut r, Vars::Xy, 3, 4));
        let scale = (&a * &(&b * &c)).max_abs().max(1.0);
        let sum = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a)))
            + &c.commutator(&a.commutator(&b));
        jacobi = jacobi.max(sum.max_abs() / scale);
        let lhs = a.commutator(&(&b * &c));
        let rhs = &(&a.commutator(&b) * &c) + &(&b * &a.commutator(&c));
        leibniz = leibniz.max(lhs.relative_residual(&rhs).unwrap());
    }
    Outcome::new(
        oracle < 1e-10 && jacobi < 1e-10 && leibniz < 1e-10,
        format!("oracle {oracle:.2e}, jacobi {jacobi:.2e}, leibniz {leibniz:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0f64;
    let mut pass = true;
    let mut stretch = (0, 0);
    let samples: Vec<_> =
        param_samples(10, 3, Sector::Plus).into_iter().chain(param_samples(10, 4, Sector::Minus)).collect();
    for p in &samples {
        for k in 1..=12 {
            let chain = build_chain(k, p, 1e-9).unwrap();
            if k <= 8 {
                worst = worst.max(chain.to_report().max_residual());
                pass &= chain.pass();
            } else {
                stretch.0 += usize::from(chain.pass());
                stretch.1 += 1;
            }
        }
        let sectors = verify_sector_actions(8, p, 1e-9).unwrap();
        worst = worst.max(sectors.max_residual());
        pass &= sectors.pass();
    }
    Outcome::new(
        pass,
        format!(
            "k <= 8 on {} samples, max residual {worst:.2e}; 9 <= k <= 12: {}/{} chains within tolerance",
            samples.len(),
            stretch.0,
            stretch.1
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut worst = 0f64;
    for p in param_samples(20, 5, Sector::Plus) {
        let ladder = verify_intertwiner_ladder(8, &p, 1e-9).unwrap();
        pass &= ladder.pass();
        worst = worst.max(ladder.max_residual());
        for n in 0..=8 {
            let c = eigenvalue_cross_check(n, &p, 1e-9);
            let direct = (eigenvalue_e(n, &p) - 2.0 * p.kappa * f64::from(n + 1)).abs();
            let raised = raise_with_aplus(n, &p, 1e-9).unwrap();
            let ratio_err = raised.ratio.map_or(f64::INFINITY, |r| (r.abs() - p.kappa.powi(n as i32)).abs() / p.kappa.powi(n as i32));
            worst = worst.max(c.residual).max(ratio_err);
            pass &= c.pass && direct < 1e-9 * p.kappa * f64::from(n + 1) && ratio_err < 1e-9;
        }
    }
    Outcome::new(pass, format!("n <= 8 on 20 samples, max residual {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let mut r = rng(6);
    let mut flow_resid = 0f64;
    for p in param_samples(10, 7, Sector::Plus) {
        let truth = canonical_flow(&p);
        let second = resolve_structure("j2").unwrap().flow(&p);
        for _ in 0..10 {
            let z = vec_of(random_state(&mut r));
            let norm = truth.h.0.amax() * z.amax();
            flow_resid = flow_resid.max((second.field(&z) - truth.field(&z)).amax() / norm);
            let (c1, c2) = (r.random_range(-5.0..5.0), r.random_range(-5.0..5.0));
            let Ok(pair) = CombinedPair::new(c1, c2) else { continue };
            let bar = respu_core::classical::FlowStructure::flow(&pair, &p);
            flow_resid = flow_resid.max((bar.field(&z) - truth.field(&z)).amax() / norm);
        }
    }

    let mut summary = (0f64, 0f64, 0f64);
    let mut used = 0;
    for p in param_samples(40, 8, Sector::Plus) {
        if !(0.5..=3.0).contains(&p.omega) || used == 4 {
            continue;
        }
        used += 1;
        let traj = integrate(&canonical_flow(&p), random_state(&mut r), 10.0, 1e-3).unwrap();
        let s = summarize(&traj, &p);
        summary = (summary.0.max(s.max_exact_error), summary.1.max(s.max_h_drift), summary.2.max(s.max_q_drift));
    }

    let mut jordan_pass = true;
    for p in param_samples(20, 9, Sector::Plus) {
        jordan_pass &= jordan_structure(&p, 1e-10).1.pass();
    }
    Outcome::new(
        flow_resid < 1e-12 && used > 0 && summary.0 < 1e-6 && summary.1 < 1e-8 && summary.2 < 1e-8 && jordan_pass,
        format!(
            "flows {flow_resid:.2e}; rk4 error {:.2e}, H drift {:.2e}, Q drift {:.2e} over {used} runs; jordan {}",
            summary.0,
            summary.1,
            summary.2,
            if jordan_pass { "ok" } else { "fail" }
        ),
    )
}

fn criterion_6() -> Outcome {
    let scan = definiteness_scan(100, 20, 42).unwrap();
    let mut r = rng(10);
    let mut worst = 0f64;
    for p in param_samples(20, 11, Sector::Plus) {
        for _ in 0..20 {
            let (c1, c2) = (r.random_range(-5.0..5.0), r.random_range(-5.0..5.0));
            let Ok((mp, mv)) = build_mp_mv(c1, c2, &p) else { continue };
            let scale = |e: [f64; 2]| e[0].abs().max(e[1].abs()).max(1.0);
            let (np, nv) = (sym_eigenvalues(&mp), sym_eigenvalues(&mv));
            let (ep, ev) = (ep_closed(c1, c2, &p).unwrap(), ev_closed(c1, c2, &p).unwrap());
            for i in 0..2 {
                worst = worst.max((ep[i] - np[i]).abs() / scale(np)).max((ev[i] - nv[i]).abs() / scale(nv));
            }
        }
    }
    Outcome::new(
        scan.simultaneous_pd == 0 && scan.control_count > 0 && worst < 1e-12,
        format!(
            "{} points, {} simultaneously PD, control {}, closed forms {worst:.2e}",
            scan.points, scan.simultaneous_pd, scan.control_count
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut r = rng(12);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let p = sample_params_positive(&mut r, Sector::Plus);
        let z = random_state(&mut r);
        let h = hg_value(z, &p);
        let hp = hpu_value(pu_from_ghost(z, &p).unwrap(), &p);
        worst = worst.max((h - hp).abs() / h.abs().max(1.0));
    }
    let mut freq = 0f64;
    for p in param_samples(100, 14, Sector::Plus) {
        let (w1, w2) = pu_frequencies(p.nu2, p.omega_cap, -(p.nu2 + p.omega_cap)).unwrap();
        freq = freq.max((w1 - w2).abs());
    }
    Outcome::new(worst < 1e-12 && freq < 1e-12, format!("energy {worst:.2e}, frequencies {freq:.2e}"))
}

fn simpson(lam: f64, n: u32) -> f64 {
    let l = (80.0 / lam).sqrt();
    let steps = 40_000;
    let h = 2.0 * l / steps as f64;
    let f = |x: f64| x.powi(n as i32) * (-lam * x * x).exp();
    let mut sum = f(-l) + f(l);
    for i in 1..steps {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(-l + i as f64 * h);
    }
    sum * h / 3.0
}

fn criterion_8() -> Outcome {
    let mut pass = true;
    let mut product = 0f64;
    let mut substitution = 0f64;
    for eta in [Sector::Plus, Sector::Minus] {
        for p in param_samples(100, 15, eta) {
            let d = diagonalize_form(&quad_form_matrix(&p)).unwrap();
            let expected = (p.omega_cap - p.nu2) / 2.0;
            product = product.max((d.lambda_plus * d.lambda_minus - expected).abs() / expected.abs());
            pass &= expected < 0.0 && d.lambda_minus < 0.0;
            if eta == Sector::Plus && d.lambda_plus > 0.0 {
                let e = effective_hamiltonian(&p).unwrap();
                pass &= e.a1 < 0.0 && e.a2 < 0.0;
            }
            let th = transformed_hamiltonian(&p).unwrap();
            let shown = transformed_hamiltonian_display(&p).unwrap();
            let scale = th.kinetic_matrix().amax().max(th.potential_matrix().amax()).max(1.0);
            substitution = substitution
                .max(th.max_abs_diff(&shown) / scale)
                .max(effective_hamiltonian_double_entry(&p).unwrap());
        }
    }
    let mut moment = 0f64;
    for lam in [0.1, 0.5, 1.0, 3.0, 10.0] {
        for n in 0..=8 {
            let exact = gaussian_moment(lam, n).unwrap();
            moment = moment.max((exact - simpson(lam, n)).abs() / exact.abs().max(1.0));
        }
    }
    Outcome::new(
        pass && product < 1e-12 && moment < 1e-10 && substitution < 1e-12,
        format!("product {product:.2e}, moments {moment:.2e}, substitution {substitution:.2e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    let mut pass = true;
    for eta in [Sector::Plus, Sector::Minus] {
        for p in param_samples(200, 16, eta) {
            let det = p.alpha * p.beta - p.gamma * p.gamma;
            let expected = (p.omega_cap - p.nu2) / 2.0;
            pass &= !p.ground_state_normalizable() && det < 0.0 && (det - expected).abs() < 1e-12 * expected.abs().max(1.0);
            count += 1;
        }
    }
    Outcome::new(pass, format!("{count} samples, none normalisable"))
}

fn respu(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_respu")).args(args).output().expect("binary runs")
}

fn criterion_10() -> Outcome {
    let run = ["verify", "--suite", "algebra,spectrum,factorization", "--samples", "2", "--seed", "7", "--json"];
    let (a, b) = (respu(&run), respu(&run));
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let pass_code = a.status.code();
    let fail_code = respu(&["verify", "--suite", "algebra", "--perturb-kappa", "1.01"]).status.code();
    let invalid_code = respu(&["verify", "--nu2", "1", "--omega-cap", "1"]).status.code();
    Outcome::new(
        identical && pass_code == Some(0) && fail_code == Some(1) && invalid_code == Some(2),
        format!("identical {identical}, exit codes {pass_code:?}/{fail_code:?}/{invalid_code:?}"),
    )
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, f) in criteria {
        let start = std::time::Instant::now();
        let o = f();
        let flag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {flag}  {}  ({:.2}s)", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
