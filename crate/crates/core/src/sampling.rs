//! Seeded parameter sampling shared by every randomized check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::params::{ModelParams, Sector};
use crate::weyl::{Multi, Vars, WeylOp};

/// Samples with `|ν² + Ω|` below this are redrawn.
pub const MIN_COUPLING: f64 = 0.05;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draws `(ν², Ω)` with `Ω ~ U[−2, 2]` and `ν² = Ω + δ`, `δ ~ U[0.1, 10]`.
pub fn sample_point<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    loop {
        let omega_cap: f64 = rng.random_range(-2.0..=2.0);
        let nu2 = omega_cap + rng.random_range(0.1..=10.0);
        if (nu2 + omega_cap).abs() >= MIN_COUPLING {
            return (nu2, omega_cap);
        }
    }
}

pub fn sample_params<R: Rng + ?Sized>(rng: &mut R, eta: Sector) -> ModelParams {
    let (nu2, omega_cap) = sample_point(rng);
    ModelParams::derive(nu2, omega_cap, eta.label()).expect("sampled point lies inside the guards")
}

/// Like [`sample_params`] but restricted to `ν² + Ω > 0`, where the map to
/// higher-derivative variables exists.
pub fn sample_params_positive<R: Rng + ?Sized>(rng: &mut R, eta: Sector) -> ModelParams {
    loop {
        let p = sample_params(rng, eta);
        if p.sum() >= MIN_COUPLING {
            return p;
        }
    }
}

/// `n` samples from a fresh generator seeded with `seed`.
pub fn param_samples(n: usize, seed: u64, eta: Sector) -> Vec<ModelParams> {
    let mut r = rng(seed);
    (0..n).map(|_| sample_params(&mut r, eta)).collect()
}

/// A random operator with `terms` monomials of total degree at most
/// `max_degree` and coefficients in `[−1, 1]`.
pub fn random_op<R: Rng + ?Sized>(rng: &mut R, vars: Vars, max_degree: u32, terms: usize) -> WeylOp {
    WeylOp::from_terms(
        vars,
        (0..terms).map(|_| {
            let mut budget = rng.random_range(0..=max_degree);
            let mut take = |rng: &mut R| {
                let k = rng.random_range(0..=budget);
                budget -= k;
                k
            };
            let m = Multi::new(take(rng), take(rng), take(rng), take(rng));
            (m, rng.random_range(-1.0..=1.0))
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_respect_convention() {
        for p in param_samples(500, 7, Sector::Plus) {
            let delta = p.gap();
            assert!((0.1..=10.0 + 1e-12).contains(&delta));
            assert!((-2.0..=2.0).contains(&p.omega_cap));
            assert!(p.sum().abs() >= MIN_COUPLING);
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        assert_eq!(param_samples(10, 42, Sector::Minus), param_samples(10, 42, Sector::Minus));
        assert_ne!(param_samples(10, 42, Sector::Plus), param_samples(10, 43, Sector::Plus));
    }

    #[test]
    fn random_ops_respect_degree() {
        let mut r = rng(11);
        for _ in 0..100 {
            let op = random_op(&mut r, Vars::Xy, 4, 5);
            assert!(op.degree() <= 4);
            assert!(op.len() <= 5);
        }
    }

    #[test]
    fn positive_variant() {
        let mut r = rng(3);
        for _ in 0..200 {
            assert!(sample_params_positive(&mut r, Sector::Plus).sum() > 0.0);
        }
    }
}
