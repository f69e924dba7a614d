//! Linear Hamiltonian dynamics on the phase space `z = (x, y, p_x, p_y)`.
//!
//! Quadratic Hamiltonians are stored as symmetric matrices with
//! `H(z) = zᵀHz`, so `∇H = 2Hz` and the flow is `ż = J·2H·z`.

use std::f64::consts::SQRT_2;

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen, Vector4};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::params::{pu_from_ghost, ModelParams, ParamError, PhaseState, PuState, Sector};
use crate::report::{Check, Report};
use crate::sampling;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("(c1, c2) = ({0}, {1}) lies on the forbidden ray c1 = −√2 c2")]
    ForbiddenRay(f64, f64),
    #[error("unknown flow structure {0:?}; expected jg, j2 or combined:c1,c2")]
    UnknownStructure(String),
    #[error("time step {dt} and horizon {t_max} must be positive and finite")]
    InvalidStep { dt: f64, t_max: f64 },
    #[error("grid size must be at least 1")]
    EmptyGrid,
    #[error(transparent)]
    Param(#[from] ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonTensor(pub Matrix4<f64>);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadHamiltonian(pub Matrix4<f64>);

impl QuadHamiltonian {
    pub fn value(&self, z: &Vector4<f64>) -> f64 {
        z.dot(&(self.0 * z))
    }

    pub fn gradient(&self, z: &Vector4<f64>) -> Vector4<f64> {
        2.0 * self.0 * z
    }

    /// Position block, acting on `(x, y)`.
    pub fn potential_block(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Momentum block, acting on `(p_x, p_y)`.
    pub fn kinetic_block(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(2, 2).into_owned()
    }
}

pub fn vec_of(z: PhaseState) -> Vector4<f64> {
    Vector4::from(z.to_array())
}

pub fn state_of(v: &Vector4<f64>) -> PhaseState {
    PhaseState::from_array([v[0], v[1], v[2], v[3]])
}

pub fn build_jg() -> PoissonTensor {
    let mut j = Matrix4::zeros();
    j[(0, 2)] = 1.0;
    j[(1, 3)] = 1.0;
    j[(2, 0)] = -1.0;
    j[(3, 1)] = -1.0;
    PoissonTensor(j)
}

pub fn build_j2(p: &ModelParams) -> PoissonTensor {
    let (n, o) = (p.nu2, p.omega_cap);
    let c = 1.0 / (SQRT_2 * p.gap());
    let upper = Matrix2::new(3.0 * n - o, -n - o, n + o, n - 3.0 * o) * c;
    let mut j = Matrix4::zeros();
    j.fixed_view_mut::<2, 2>(0, 2).copy_from(&upper);
    j.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-upper.transpose()));
    PoissonTensor(j)
}

/// `p_x² − p_y² + ν²x² + Ωy² + g·xy`
pub fn build_hg_classical(p: &ModelParams) -> QuadHamiltonian {
    let mut h = Matrix4::from_diagonal(&Vector4::new(p.nu2, p.omega_cap, 1.0, -1.0));
    h[(0, 1)] = 0.5 * p.g;
    h[(1, 0)] = 0.5 * p.g;
    QuadHamiltonian(h)
}

pub fn build_h2_classical(p: &ModelParams) -> QuadHamiltonian {
    let (n, o, d) = (p.nu2, p.omega_cap, p.gap());
    let c = 1.0 / (2.0 * SQRT_2);
    let mut h = Matrix4::zeros();
    h[(0, 0)] = c * 0.5 * (3.0 * n - o);
    h[(1, 1)] = c * 0.5 * (3.0 * o - n);
    h[(0, 1)] = -c * 0.5 * (n + o);
    h[(1, 0)] = h[(0, 1)];
    h[(2, 2)] = c * (n - 3.0 * o) / d;
    h[(3, 3)] = c * (o - 3.0 * n) / d;
    h[(2, 3)] = -c * (n + o) / d;
    h[(3, 2)] = h[(2, 3)];
    QuadHamiltonian(h)
}

/// A Poisson tensor paired with a quadratic Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFlow {
    pub j: PoissonTensor,
    pub h: QuadHamiltonian,
}

impl PhaseFlow {
    /// `A` in `ż = A z`.
    pub fn generator(&self) -> Matrix4<f64> {
        2.0 * self.j.0 * self.h.0
    }

    pub fn field(&self, z: &Vector4<f64>) -> Vector4<f64> {
        self.j.0 * self.h.gradient(z)
    }
}

pub fn flow_field(j: &PoissonTensor, h: &QuadHamiltonian, z: PhaseState) -> Vector4<f64> {
    PhaseFlow { j: *j, h: *h }.field(&vec_of(z))
}

/// The canonical flow matrix of `H_g`.
pub fn flow_matrix(p: &ModelParams) -> Matrix4<f64> {
    canonical_flow(p).generator()
}

pub fn canonical_flow(p: &ModelParams) -> PhaseFlow {
    PhaseFlow { j: build_jg(), h: build_hg_classical(p) }
}

/// One choice of Poisson tensor and Hamiltonian generating the resonant flow.
pub trait FlowStructure: Send + Sync {
    fn name(&self) -> String;
    fn flow(&self, p: &ModelParams) -> PhaseFlow;
}

pub struct CanonicalStructure;

impl FlowStructure for CanonicalStructure {
    fn name(&self) -> String {
        "jg".into()
    }

    fn flow(&self, p: &ModelParams) -> PhaseFlow {
        canonical_flow(p)
    }
}

pub struct SecondStructure;

impl FlowStructure for SecondStructure {
    fn name(&self) -> String {
        "j2".into()
    }

    fn flow(&self, p: &ModelParams) -> PhaseFlow {
        PhaseFlow { j: build_j2(p), h: build_h2_classical(p) }
    }
}

/// `J̄ = c₁J_g + c₂J₂`, `H̄ = c₃H_g + c₄H₂` with `c₃ = c₁/Δ`, `c₄ = 2c₂/Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CombinedPair {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub delta: f64,
}

impl CombinedPair {
    pub fn new(c1: f64, c2: f64) -> Result<Self, ClassicalError> {
        let ray = c1 + SQRT_2 * c2;
        if !ray.is_finite() || ray.abs() < 1e-6 * (c1.abs() + c2.abs() + 1.0) {
            return Err(ClassicalError::ForbiddenRay(c1, c2));
        }
        let delta = ray * ray;
        Ok(Self { c1, c2, c3: c1 / delta, c4: 2.0 * c2 / delta, delta })
    }
}

impl FlowStructure for CombinedPair {
    fn name(&self) -> String {
        format!("combined:{},{}", self.c1, self.c2)
    }

    fn flow(&self, p: &ModelParams) -> PhaseFlow {
        PhaseFlow {
            j: PoissonTensor(self.c1 * build_jg().0 + self.c2 * build_j2(p).0),
            h: QuadHamiltonian(self.c3 * build_hg_classical(p).0 + self.c4 * build_h2_classical(p).0),
        }
    }
}

/// Resolves `jg`, `j2` or `combined:c1,c2`.
pub fn resolve_structure(spec: &str) -> Result<Box<dyn FlowStructure>, ClassicalError> {
    let unknown = || ClassicalError::UnknownStructure(spec.to_string());
    match spec {
        "jg" => Ok(Box::new(CanonicalStructure)),
        "j2" => Ok(Box::new(SecondStructure)),
        _ => {
            let coeffs = spec.strip_prefix("combined:").ok_or_else(unknown)?;
            let (a, b) = coeffs.split_once(',').ok_or_else(unknown)?;
            let c1 = a.trim().parse().map_err(|_| unknown())?;
            let c2 = b.trim().parse().map_err(|_| unknown())?;
            Ok(Box::new(CombinedPair::new(c1, c2)?))
        }
    }
}

/// Fixed-step RK4. Returns `(t, z)` at every step including `t = 0`.
pub fn integrate(
    flow: &PhaseFlow,
    z0: PhaseState,
    t_max: f64,
    dt: f64,
) -> Result<Vec<(f64, PhaseState)>, ClassicalError> {
    if !(dt > 0.0 && t_max > 0.0 && dt.is_finite() && t_max.is_finite()) {
        return Err(ClassicalError::InvalidStep { dt, t_max });
    }
    let a = flow.generator();
    let steps = (t_max / dt).round() as usize;
    let mut z = vec_of(z0);
    let mut out = Vec::with_capacity(steps + 1);
    out.push((0.0, z0));
    for i in 1..=steps {
        let k1 = a * z;
        let k2 = a * (z + 0.5 * dt * k1);
        let k3 = a * (z + 0.5 * dt * k2);
        let k4 = a * (z + dt * k3);
        z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((i as f64 * dt, state_of(&z)));
    }
    Ok(out)
}

/// `exp(At)` for the resonant flow matrix, using `(A² + ω²)² = 0`.
pub fn propagator(p: &ModelParams, t: f64) -> Matrix4<f64> {
    let a = flow_matrix(p);
    let w = p.omega;
    let id = Matrix4::identity();
    let b = a * a + w * w * id;
    let (s, c) = (w * t).sin_cos();
    c * id + (t * s / (2.0 * w)) * b + a * (s / w * id + (s / (2.0 * w.powi(3)) - t * c / (2.0 * w * w)) * b)
}

pub fn exact_solution(z0: PhaseState, t: f64, p: &ModelParams) -> PhaseState {
    state_of(&(propagator(p, t) * vec_of(z0)))
}

/// Faddeev–LeVerrier: coefficients of `det(λ − A)` from `λ⁴` down to `λ⁰`.
pub fn characteristic_polynomial(a: &Matrix4<f64>) -> [f64; 5] {
    let mut coeffs = [0.0; 5];
    coeffs[0] = 1.0;
    let mut m = Matrix4::zeros();
    for k in 1..=4 {
        m = a * m + coeffs[k - 1] * Matrix4::identity();
        coeffs[k] = -(a * m).trace() / k as f64;
    }
    coeffs
}

#[derive(Debug, Clone, Serialize)]
pub struct JordanStructure {
    pub char_poly: [f64; 5],
    pub expected_char_poly: [f64; 5],
    pub rank_shifted: usize,
    pub singular_values: Vec<f64>,
    /// Largest entry of `A² + ω²`.
    pub first_power: f64,
    /// Largest entry of `(A² + ω²)²`.
    pub second_power: f64,
}

pub fn jordan_structure(p: &ModelParams, tol: f64) -> (JordanStructure, Report) {
    let a = flow_matrix(p);
    let w2 = p.omega * p.omega;
    let expected = [1.0, 0.0, 2.0 * w2, 0.0, w2 * w2];
    let char_poly = characteristic_polynomial(&a);
    let shifted: Matrix4<Complex<f64>> =
        a.map(|v| Complex::new(v, 0.0)) - Matrix4::identity() * Complex::new(0.0, p.omega);
    let mut sv: Vec<f64> = shifted.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let a_norm = a.abs().max();
    let rank_shifted = sv.iter().filter(|&&s| s > 1e-8 * a_norm).count();
    let b = a * a + w2 * Matrix4::identity();
    let js = JordanStructure {
        char_poly,
        expected_char_poly: expected,
        rank_shifted,
        singular_values: sv,
        first_power: b.abs().max(),
        second_power: (b * b).abs().max(),
    };
    let poly_scale = expected.iter().fold(1f64, |m, c| m.max(c.abs()));
    let poly_resid = char_poly
        .iter()
        .zip(expected)
        .fold(0f64, |m, (c, e)| m.max((c - e).abs()))
        / poly_scale;
    let b_scale = a_norm.powi(2).max(w2).max(1.0);
    let rep = Report::from_iter([
        Check::new("char poly = (l^2+w^2)^2", poly_resid, tol),
        Check::new("(A^2+w^2)^2 = 0", js.second_power / (b_scale * b_scale), tol),
        Check::claim("A^2+w^2 != 0", js.first_power / b_scale > 1e-6),
        Check::claim("rank(A - iw) = 3", rank_shifted == 3),
    ]);
    (js, rep)
}

/// `M_p` and `M_v` from their closed forms.
pub fn build_mp_mv(c1: f64, c2: f64, p: &ModelParams) -> Result<(Matrix2<f64>, Matrix2<f64>), ClassicalError> {
    let pair = CombinedPair::new(c1, c2)?;
    let (n, o, d, s) = (p.nu2, p.omega_cap, p.gap(), p.sum());
    let delta = pair.delta;
    let mp = Matrix2::new(
        SQRT_2 * d * c1 + (n - 3.0 * o) * c2,
        -s * c2,
        -s * c2,
        SQRT_2 * (o - n) * c1 + (o - 3.0 * n) * c2,
    ) / (SQRT_2 * d * delta);
    let off = -(2.0 * c1 + SQRT_2 * c2) * s;
    let mv = Matrix2::new(
        4.0 * n * c1 + SQRT_2 * (3.0 * n - o) * c2,
        off,
        off,
        4.0 * o * c1 - SQRT_2 * (n - 3.0 * o) * c2,
    ) / (4.0 * delta);
    Ok((mp, mv))
}

/// Closed-form eigenvalues of `M_p`, larger first.
pub fn ep_closed(c1: f64, c2: f64, p: &ModelParams) -> Result<[f64; 2], ClassicalError> {
    let pair = CombinedPair::new(c1, c2)?;
    let (n, o, d) = (p.nu2, p.omega_cap, p.gap());
    let root = (2.0 * c1 * c1 * d * d
        + 4.0 * SQRT_2 * c1 * c2 * d * d
        + c2 * c2 * (5.0 * n * n - 6.0 * n * o + 5.0 * o * o))
        .sqrt();
    let denom = SQRT_2 * pair.delta * d;
    let mut e = [-(c2 * p.sum() + root) / denom, -(c2 * p.sum() - root) / denom];
    e.sort_by(|a, b| b.total_cmp(a));
    Ok(e)
}

/// Closed-form eigenvalues of `M_v`, larger first.
pub fn ev_closed(c1: f64, c2: f64, p: &ModelParams) -> Result<[f64; 2], ClassicalError> {
    let pair = CombinedPair::new(c1, c2)?;
    let (n, o) = (p.nu2, p.omega_cap);
    let root = (8.0 * c1 * c1 * (n * n + o * o)
        + 4.0 * SQRT_2 * c2 * c1 * (3.0 * n * n - 2.0 * n * o + 3.0 * o * o)
        + 2.0 * c2 * c2 * (5.0 * n * n - 6.0 * n * o + 5.0 * o * o))
        .sqrt();
    let lead = (2.0 * c1 + SQRT_2 * c2) * p.sum();
    let denom = 4.0 * pair.delta;
    let mut e = [(lead + root) / denom, (lead - root) / denom];
    e.sort_by(|a, b| b.total_cmp(a));
    Ok(e)
}

/// Eigenvalues of a symmetric 2×2 matrix, larger first.
pub fn sym_eigenvalues(m: &Matrix2<f64>) -> [f64; 2] {
    let e = SymmetricEigen::new(*m).eigenvalues;
    [e.max(), e.min()]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub c1: f64,
    pub c2: f64,
    pub nu2: f64,
    pub omega_cap: f64,
    /// `min(min eig M_p, min eig M_v)`
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefinitenessScan {
    pub grid_c: usize,
    pub grid_p: usize,
    pub seed: u64,
    pub points: usize,
    pub skipped_forbidden: usize,
    pub simultaneous_pd: usize,
    pub mp_pd: usize,
    pub mv_pd: usize,
    /// Count after replacing both blocks by their absolute values; a sanity
    /// check on the counter.
    pub control_count: usize,
    pub best: Option<ScanPoint>,
}

fn grid_axis(n: usize) -> Vec<f64> {
    match n {
        1 => vec![0.0],
        _ => (0..n).map(|i| -5.0 + 10.0 * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Counts `(c₁, c₂) ∈ [−5, 5]²` grid points where `M_p` and `M_v` are both
/// positive definite, over `grid_p` sampled parameter points.
pub fn definiteness_scan(grid_c: usize, grid_p: usize, seed: u64) -> Result<DefinitenessScan, ClassicalError> {
    if grid_c == 0 || grid_p == 0 {
        return Err(ClassicalError::EmptyGrid);
    }
    let axis = grid_axis(grid_c);
    let params = sampling::param_samples(grid_p, seed, Sector::Plus);
    let partial: Vec<DefinitenessScan> = params
        .par_iter()
        .map(|p| {
            let mut acc = DefinitenessScan {
                grid_c,
                grid_p,
                seed,
                points: 0,
                skipped_forbidden: 0,
                simultaneous_pd: 0,
                mp_pd: 0,
                mv_pd: 0,
                control_count: 0,
                best: None,
            };
            for &c1 in &axis {
                for &c2 in &axis {
                    let Ok((mp, mv)) = build_mp_mv(c1, c2, p) else {
                        acc.skipped_forbidden += 1;
                        continue;
                    };
                    acc.points += 1;
                    let ep = sym_eigenvalues(&mp);
                    let ev = sym_eigenvalues(&mv);
                    if ep[1] > 0.0 && ev[1] > 0.0 {
                        acc.simultaneous_pd += 1;
                    }
                    acc.mp_pd += usize::from(ep[1] > 0.0);
                    acc.mv_pd += usize::from(ev[1] > 0.0);
                    let abs_min = |e: [f64; 2]| e[0].abs().min(e[1].abs());
                    if abs_min(ep) > 0.0 && abs_min(ev) > 0.0 {
                        acc.control_count += 1;
                    }
                    let margin = ep[1].min(ev[1]);
                    if acc.best.is_none_or(|b| margin > b.margin) {
                        acc.best = Some(ScanPoint { c1, c2, nu2: p.nu2, omega_cap: p.omega_cap, margin });
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = partial[0].clone();
    for part in &partial[1..] {
        total.points += part.points;
        total.skipped_forbidden += part.skipped_forbidden;
        total.simultaneous_pd += part.simultaneous_pd;
        total.mp_pd += part.mp_pd;
        total.mv_pd += part.mv_pd;
        total.control_count += part.control_count;
        if let Some(b) = part.best {
            if total.best.is_none_or(|t| b.margin > t.margin) {
                total.best = Some(b);
            }
        }
    }
    Ok(total)
}

/// `((ν²+Ω)/(ν²−Ω))[(p_x + p_y)²/(ν²−Ω) + ½(x − y)²]`
pub fn conserved_q(z: PhaseState, p: &ModelParams) -> f64 {
    let d = p.gap();
    let ps = z.px + z.py;
    let dx = z.x - z.y;
    p.sum() / d * (ps * ps / d + 0.5 * dx * dx)
}

/// `ω²(q + q̈/ω²)² + (q̇ + q⃛/ω²)²`
pub fn conserved_q_pu(s: PuState, p: &ModelParams) -> f64 {
    let w2 = p.omega * p.omega;
    let a = s.q + s.qddot / w2;
    let b = s.qdot + s.qdddot / w2;
    w2 * a * a + b * b
}

/// `Q` as a quadratic form, `Q(z) = zᵀQz`.
pub fn q_matrix(p: &ModelParams) -> QuadHamiltonian {
    let d = p.gap();
    let c = p.sum() / d;
    let mut m = Matrix4::zeros();
    for (i, j, sign) in [(0, 0, 1.0), (1, 1, 1.0), (0, 1, -1.0), (1, 0, -1.0)] {
        m[(i, j)] = 0.5 * c * sign;
    }
    for i in 2..4 {
        for j in 2..4 {
            m[(i, j)] = c / d;
        }
    }
    QuadHamiltonian(m)
}

/// Relative mismatch between `J∇Q` and the true flow at `z`.
pub fn q_flow_mismatch(j: &PoissonTensor, p: &ModelParams, z: PhaseState) -> f64 {
    let zq = flow_field(j, &q_matrix(p), z);
    let zt = flow_field(&build_jg(), &build_hg_classical(p), z);
    (zq - zt).abs().max() / zt.abs().max().max(f64::MIN_POSITIVE)
}

/// Least-squares fit of `q(t)` onto `cos ωt, sin ωt, t cos ωt, t sin ωt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecularFit {
    pub coeffs: [f64; 4],
    /// Largest pointwise misfit relative to `max |q|`.
    pub residual: f64,
    /// `√(c₃² + c₄²)`, the linear growth rate of the envelope.
    pub secular_amplitude: f64,
}

pub fn secular_fit(samples: &[(f64, f64)], omega: f64) -> SecularFit {
    let basis = |t: f64| {
        let (s, c) = (omega * t).sin_cos();
        nalgebra::Vector4::new(c, s, t * c, t * s)
    };
    let mut ata = Matrix4::zeros();
    let mut atb = Vector4::zeros();
    for &(t, q) in samples {
        let row = basis(t);
        ata += row * row.transpose();
        atb += row * q;
    }
    let coeffs = ata.cholesky().map(|ch| ch.solve(&atb)).unwrap_or_else(Vector4::zeros);
    let scale = samples.iter().fold(0f64, |m, &(_, q)| m.max(q.abs())).max(f64::MIN_POSITIVE);
    let residual = samples
        .iter()
        .fold(0f64, |m, &(t, q)| m.max((basis(t).dot(&coeffs) - q).abs()))
        / scale;
    SecularFit {
        coeffs: [coeffs[0], coeffs[1], coeffs[2], coeffs[3]],
        residual,
        secular_amplitude: coeffs[2].hypot(coeffs[3]),
    }
}

/// `q(t)` along the exact solution, sampled at `n + 1` equally spaced times.
pub fn q_series(z0: PhaseState, p: &ModelParams, t_max: f64, n: usize) -> Result<Vec<(f64, f64)>, ClassicalError> {
    (0..=n)
        .map(|i| {
            let t = t_max * i as f64 / n as f64;
            Ok((t, pu_from_ghost(exact_solution(z0, t, p), p)?.q))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub max_h_drift: f64,
    pub max_q_drift: f64,
    pub max_exact_error: f64,
}

/// Drifts of `H_g` and `Q` relative to their initial scale, and the largest
/// deviation from the closed-form solution relative to `max ‖z‖∞`.
pub fn summarize(traj: &[(f64, PhaseState)], p: &ModelParams) -> TrajectorySummary {
    let h = build_hg_classical(p);
    let z0 = traj[0].1;
    let h0 = h.value(&vec_of(z0));
    let q0 = conserved_q(z0, p);
    let h_scale = h.0.abs().max() * z0.norm_inf().powi(2);
    let q_scale = q_matrix(p).0.abs().max() * z0.norm_inf().powi(2);
    let z_scale = traj.iter().fold(0f64, |m, (_, z)| m.max(z.norm_inf())).max(f64::MIN_POSITIVE);
    let mut s = TrajectorySummary { max_h_drift: 0.0, max_q_drift: 0.0, max_exact_error: 0.0 };
    for &(t, z) in traj {
        s.max_h_drift = s.max_h_drift.max((h.value(&vec_of(z)) - h0).abs() / h_scale.max(f64::MIN_POSITIVE));
        s.max_q_drift = s.max_q_drift.max((conserved_q(z, p) - q0).abs() / q_scale.max(f64::MIN_POSITIVE));
        let exact = vec_of(exact_solution(z0, t, p));
        s.max_exact_error = s.max_exact_error.max((vec_of(z) - exact).abs().max() / z_scale);
    }
    s
}
