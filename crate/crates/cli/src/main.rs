mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Verification, spectra, simulation and scans for the resonant
/// Pais–Uhlenbeck oscillator.
#[derive(Debug, Parser)]
#[command(name = "respu", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// ν²
    #[arg(long, global = true, default_value_t = 2.0, allow_negative_numbers = true)]
    pub nu2: f64,
    /// Ω
    #[arg(long = "omega-cap", global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub omega_cap: f64,
    /// Sector label η, +1 or −1
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true)]
    pub eta: i32,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Emit a JSON report
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV
    #[arg(long, global = true)]
    pub csv: bool,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the verification suites
    Verify(VerifyArgs),
    /// Eigenvalue table and Jordan chains
    Spectrum(SpectrumArgs),
    /// Integrate the classical flow
    Simulate(SimulateArgs),
    /// Definiteness and λ± region scans
    Scan(ScanArgs),
    /// Ground-state factorisation and effective Hamiltonian
    Factorize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `all` or a comma-separated list of params, algebra, spectrum, classical, factorization
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Extra random parameter points for the algebra suite
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long = "k-max", default_value_t = 8)]
    pub k_max: u32,
    #[arg(long = "n-max", default_value_t = 8)]
    pub n_max: u32,
    #[arg(long = "t-max", default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Multiply κ by this factor before checking (negative control)
    #[arg(long = "perturb-kappa")]
    pub perturb_kappa: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "k-max", default_value_t = 8)]
    pub k_max: u32,
    #[arg(long = "n-max", default_value_t = 8)]
    pub n_max: u32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// jg, j2 or combined:c1,c2
    #[arg(long, default_value = "jg")]
    pub structure: String,
    #[arg(long = "t-max", default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Initial point x,y,px,py
    #[arg(long, default_value = "0.7,-0.4,0.3,0.5", allow_hyphen_values = true)]
    pub z0: String,
    /// Keep every n-th step in the trajectory CSV
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long = "grid-c", default_value_t = 100)]
    pub grid_c: usize,
    #[arg(long = "grid-p", default_value_t = 20)]
    pub grid_p: usize,
    /// Parameter samples for the λ± region scan
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => match output::emit(&cli.common, &outcome) {
            Ok(()) if outcome.pass => ExitCode::SUCCESS,
            Ok(()) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
