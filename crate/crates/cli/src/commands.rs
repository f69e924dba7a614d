use std::fmt::Display;

use respu_core::classical::{self, ClassicalError, QuadHamiltonian};
use respu_core::factorization::{self, FactorError};
use respu_core::spectrum::{self, SpectrumError, MAX_CHAIN_DEPTH};
use respu_core::suites::{self, SuiteConfig, SuiteError};
use respu_core::{sampling, Check, ModelParams, ParamError, PhaseState, Report};
use serde_json::{json, Value};

use crate::output::{fmt_f64, Table};
use crate::{Cli, Command, ScanArgs, SimulateArgs, SpectrumArgs, VerifyArgs};

/// Anything that makes the request itself invalid (exit code 2).
#[derive(Debug)]
pub struct InvalidInput(pub String);

impl Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for InvalidInput {
            fn from(e: $t) -> Self {
                InvalidInput(e.to_string())
            }
        }
    )*};
}
invalid_from!(ParamError, SpectrumError, ClassicalError, FactorError, SuiteError);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), InvalidInput> {
    cond.then_some(()).ok_or_else(|| InvalidInput(msg.into()))
}

pub struct Outcome {
    pub command: &'static str,
    pub params: Value,
    pub report: Report,
    pub data: Value,
    pub table: Table,
    pub pass: bool,
}

impl Outcome {
    fn new(command: &'static str, params: Value, report: Report, data: Value, table: Option<Table>) -> Self {
        let pass = report.pass();
        let table = table.unwrap_or_else(|| checks_table(&report));
        Self { command, params, report, data, table, pass }
    }
}

fn checks_table(report: &Report) -> Table {
    Table {
        header: vec!["name", "residual", "tolerance", "pass"],
        rows: report
            .checks
            .iter()
            .map(|c| vec![c.name.clone(), fmt_f64(c.residual), fmt_f64(c.tolerance), c.pass.to_string()])
            .collect(),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, InvalidInput> {
    let c = &cli.common;
    ensure(c.tol.is_finite() && c.tol > 0.0, format!("tolerance {} must be positive", c.tol))?;
    let params = || ModelParams::derive(c.nu2, c.omega_cap, c.eta);
    match &cli.command {
        Command::Verify(args) => verify(params()?, c.tol, c.seed, args),
        Command::Spectrum(args) => spectrum_cmd(params()?, c.tol, args),
        Command::Simulate(args) => simulate(params()?, args),
        Command::Scan(args) => scan(c.seed, args),
        Command::Factorize => factorize(params()?, c.tol, c.seed),
    }
}

fn verify(mut p: ModelParams, tol: f64, seed: u64, args: &VerifyArgs) -> Result<Outcome, InvalidInput> {
    ensure(args.k_max >= 1 && args.k_max <= MAX_CHAIN_DEPTH, format!("--k-max must lie in 1..={MAX_CHAIN_DEPTH}"))?;
    ensure(args.n_max <= MAX_CHAIN_DEPTH, format!("--n-max must not exceed {MAX_CHAIN_DEPTH}"))?;
    ensure(args.dt > 0.0 && args.t_max > 0.0, "--dt and --t-max must be positive")?;
    let selected = suites::select(&args.suite)?;
    if let Some(f) = args.perturb_kappa {
        ensure(f.is_finite() && f > 0.0, "--perturb-kappa must be a positive factor")?;
        p.kappa *= f;
    }
    let cfg = SuiteConfig { params: p, tol, seed, k_max: args.k_max, n_max: args.n_max, t_max: args.t_max, dt: args.dt };
    let mut report = suites::run_all(&selected, &cfg)?;
    if selected.iter().any(|s| s.name() == "algebra") {
        for (i, q) in sampling::param_samples(args.samples, seed, p.eta).iter().enumerate() {
            let prefix = format!("sample[{i}] algebra: ");
            report.extend(respu_core::algebra::verify_identity_suite(q, tol).checks.into_iter().map(|c| c.prefixed(&prefix)).collect());
        }
    }
    let data = json!({ "suites": selected.iter().map(|s| s.name()).collect::<Vec<_>>(), "samples": args.samples });
    Ok(Outcome::new("verify", json!(p), report, data, None))
}

fn spectrum_cmd(p: ModelParams, tol: f64, args: &SpectrumArgs) -> Result<Outcome, InvalidInput> {
    ensure(args.k_max >= 1 && args.k_max <= MAX_CHAIN_DEPTH, format!("--k-max must lie in 1..={MAX_CHAIN_DEPTH}"))?;
    ensure(args.n_max <= MAX_CHAIN_DEPTH, format!("--n-max must not exceed {MAX_CHAIN_DEPTH}"))?;
    let rows = spectrum::spectrum_table(args.n_max, &p)?;
    let chain_tol = tol.max(1e-9);
    let mut report = Report::new();
    let mut chains = Vec::new();
    for k in 1..=args.k_max {
        let chain = spectrum::build_chain(k, &p, chain_tol)?;
        report.extend(chain.to_report());
        chains.push(json!({
            "k": k,
            "eigenvalue": chain.eigenvalue,
            "h2_eigenvalue": std::f64::consts::SQRT_2 * p.eta.sign() * p.kappa * f64::from(k),
            "scale": chain.scale,
            "termination_residual": chain.termination_residual,
            "relation_residuals": chain.relation_residuals,
            "h2_residuals": chain.h2_residuals,
            "pass": chain.pass(),
        }));
    }
    for row in &rows {
        report.push(Check::new(format!("E_{} H1", row.n), row.residual_h1, chain_tol));
        report.push(Check::new(format!("E_{} Hg", row.n), row.residual_hg, chain_tol));
    }
    let table = Table {
        header: vec!["n", "E_n", "residual_H1", "residual_Hg"],
        rows: rows
            .iter()
            .map(|r| vec![r.n.to_string(), fmt_f64(r.e_n), fmt_f64(r.residual_h1), fmt_f64(r.residual_hg)])
            .collect(),
    };
    let data = json!({
        "bounded_below": spectrum::bounded_below(&p),
        "rows": rows,
        "chains": chains,
    });
    Ok(Outcome::new("spectrum", json!(p), report, data, Some(table)))
}

fn parse_z0(s: &str) -> Result<PhaseState, InvalidInput> {
    let vals = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| InvalidInput(format!("--z0: {e}")))?;
    let arr: [f64; 4] = vals.try_into().map_err(|_| InvalidInput("--z0 needs four values".into()))?;
    ensure(arr.iter().all(|v| v.is_finite()), "--z0 values must be finite")?;
    Ok(PhaseState::from_array(arr))
}

fn simulate(p: ModelParams, args: &SimulateArgs) -> Result<Outcome, InvalidInput> {
    ensure(args.stride >= 1, "--stride must be at least 1")?;
    let z0 = parse_z0(&args.z0)?;
    let structure = classical::resolve_structure(&args.structure)?;
    let flow = structure.flow(&p);
    let traj = classical::integrate(&flow, z0, args.t_max, args.dt)?;
    let summary = classical::summarize(&traj, &p);

    let mut report = Report::from_iter([
        Check::new("H drift", summary.max_h_drift, 1e-8),
        Check::new("Q drift", summary.max_q_drift, 1e-8),
        Check::new("exact solution error", summary.max_exact_error, 1e-6),
    ]);
    if structure.name() != "jg" {
        let reference = classical::integrate(&classical::canonical_flow(&p), z0, args.t_max, args.dt)?;
        let scale = reference.iter().fold(0f64, |m, (_, z)| m.max(z.norm_inf())).max(f64::MIN_POSITIVE);
        let diff = traj.iter().zip(&reference).fold(0f64, |m, ((_, a), (_, b))| {
            m.max((classical::vec_of(*a) - classical::vec_of(*b)).amax())
        });
        report.push(Check::new("matches jg trajectory", diff / scale, 1e-9));
    }
    let mut secular = Value::Null;
    if p.sum() > 0.0 {
        let series = traj
            .iter()
            .step_by(10)
            .map(|&(t, z)| Ok((t, respu_core::params::pu_from_ghost(z, &p)?.q)))
            .collect::<Result<Vec<_>, ParamError>>()?;
        let period = std::f64::consts::TAU / p.omega;
        if series.len() >= 8 && args.t_max >= period {
            let fit = classical::secular_fit(&series, p.omega);
            report.push(Check::claim("q(t) secular growth", fit.secular_amplitude > 1e-8));
            secular = json!(fit);
        }
    }

    let h = classical::build_hg_classical(&p);
    let value = |hq: &QuadHamiltonian, z: PhaseState| hq.value(&classical::vec_of(z));
    let table = Table {
        header: vec!["t", "x", "y", "px", "py", "H", "Q"],
        rows: traj
            .iter()
            .step_by(args.stride)
            .map(|&(t, z)| {
                [t, z.x, z.y, z.px, z.py, value(&h, z), classical::conserved_q(z, &p)]
                    .iter()
                    .map(|&v| fmt_f64(v))
                    .collect()
            })
            .collect(),
    };
    let data = json!({
        "structure": structure.name(),
        "z0": z0,
        "t_max": args.t_max,
        "dt": args.dt,
        "steps": traj.len() - 1,
        "summary": summary,
        "secular_fit": secular,
    });
    Ok(Outcome::new("simulate", json!(p), report, data, Some(table)))
}

fn scan(seed: u64, args: &ScanArgs) -> Result<Outcome, InvalidInput> {
    ensure(args.grid_c >= 1 && args.grid_p >= 1, "--grid-c and --grid-p must be at least 1")?;
    ensure(args.samples >= 1, "--samples must be at least 1")?;
    let defin = classical::definiteness_scan(args.grid_c, args.grid_p, seed)?;
    let region = factorization::lambda_region_scan(args.samples, seed)?;
    let report = Report::from_iter([
        Check::claim("no simultaneously positive-definite point", defin.simultaneous_pd == 0),
        Check::claim("control counter fires", defin.control_count > 0),
        Check::claim("lambda- < 0 everywhere", region.lambda_minus_negative_everywhere),
        Check::claim("lambda+ lambda- < 0 everywhere", region.determinant_negative_everywhere),
    ]);
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let table = Table {
        header: vec!["nu2", "Omega", "eta", "lambda_plus", "lambda_minus", "a1", "a2", "a3", "normalizable_flag"],
        rows: region
            .rows
            .iter()
            .map(|r| {
                vec![
                    fmt_f64(r.nu2),
                    fmt_f64(r.omega_cap),
                    r.eta.to_string(),
                    fmt_f64(r.lambda_plus),
                    fmt_f64(r.lambda_minus),
                    opt(r.a1),
                    opt(r.a2),
                    opt(r.a3),
                    r.normalizable.to_string(),
                ]
            })
            .collect(),
    };
    let data = json!({
        "definiteness": defin,
        "lambda_region": {
            "samples": region.samples,
            "fraction_lambda_plus_positive": region.fraction_lambda_plus_positive,
            "lambda_minus_negative_everywhere": region.lambda_minus_negative_everywhere,
            "boundary": region.boundary,
        },
    });
    let params = json!({ "grid_c": args.grid_c, "grid_p": args.grid_p, "samples": args.samples, "seed": seed });
    Ok(Outcome::new("scan", params, report, data, Some(table)))
}

fn factorize(p: ModelParams, tol: f64, seed: u64) -> Result<Outcome, InvalidInput> {
    let result = factorization::factorize(&p)?;
    let report = factorization::verify_factorization(&p, tol, &mut sampling::rng(seed))?;
    let data = json!({
        "lambda_plus": result.diag.lambda_plus,
        "lambda_minus": result.diag.lambda_minus,
        "v_plus": result.diag.v_plus,
        "v_minus": result.diag.v_minus,
        "rho_plus": result.diag.rho_plus,
        "rho_minus": result.diag.rho_minus,
        "u": result.diag.u,
        "transformed": result.transformed,
        "effective": result.effective,
        "normalizable_flag": result.lambda_plus_positive,
        "a1_negative": result.effective.map(|e| e.a1 < 0.0),
        "a2_negative": result.effective.map(|e| e.a2 < 0.0),
    });
    Ok(Outcome::new("factorize", json!(p), report, data, None))
}
