//! `z2flow`: run the ℤ₂ spectral flow experiments and write reports.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 on numerical
//! refusals and on failed checks.

mod commands;
mod report;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use z2flow::{PathOptions, Tolerance};

use crate::report::{CliError, Outcome, Report};

#[derive(Parser, Debug)]
#[command(name = "z2flow", version, about = "Z2 spectral flow of real skew-adjoint paths")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalOpts {
    /// Absolute kernel tolerance. Default: dim·eps·‖T‖ per matrix.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Projector-variation bound of the path partition, in (0, 0.2].
    #[arg(long, global = true, default_value_t = 0.2)]
    pub epsilon: f64,
    /// Also write the JSON report to this file.
    #[arg(long, global = true, value_name = "OUT")]
    #[serde(skip)]
    pub json: Option<PathBuf>,
    /// Write spectra along the path as CSV.
    #[arg(long, global = true, value_name = "OUT")]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Progress messages on stderr.
    #[arg(long, short, global = true)]
    #[serde(skip)]
    pub verbose: bool,
}

impl GlobalOpts {
    pub fn tolerance(&self) -> Result<Tolerance, CliError> {
        let tol = Tolerance {
            kernel_tol: self.tol,
            epsilon: self.epsilon,
            ..Tolerance::default()
        };
        tol.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(tol)
    }

    pub fn path_options(&self) -> PathOptions {
        PathOptions::default()
    }

    pub fn note(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("[z2flow] {}", msg.as_ref());
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// SF2 of a named path or of sampled matrices.
    Sf2Path(Sf2PathArgs),
    /// The index map on random orthogonal matrices.
    Jmap(JmapArgs),
    /// Index pairing of the shift on a circle of 2N+1 sites.
    Toeplitz(ToeplitzArgs),
    /// SF2 of the flux insertion in the Kitaev chain.
    KitaevFlux(KitaevArgs),
    /// Zero modes bound to a half flux, against the flux SF2.
    Defect(KitaevArgs),
    /// Z2 polarization of a Rice-Mele cycle.
    Polarization(PolarizationArgs),
    /// Run the quick property suites and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    #[value(name = "linear-2x2")]
    #[serde(rename = "linear-2x2")]
    Linear2x2,
    #[value(name = "abs-2x2")]
    #[serde(rename = "abs-2x2")]
    Abs2x2,
    #[value(name = "block-4x4")]
    #[serde(rename = "block-4x4")]
    Block4x4,
    Planted,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Windowed,
    PhaseSum,
    Crossings,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct Sf2PathArgs {
    #[arg(long, required_unless_present = "samples", conflicts_with = "samples")]
    pub generator: Option<Generator>,
    /// CSV of stacked dim×dim blocks, each row `t, a_1, …, a_dim`.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// JSON sidecar `{"schema": 1, "dim": d, "loop": false}`. Default: the
    /// samples file with extension `.json`.
    #[arg(long, requires = "samples")]
    pub sidecar: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Windowed)]
    pub method: MethodArg,
    /// Seed of the planted generator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dimension of the planted generator.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    /// Upper bound on planted crossings.
    #[arg(long, default_value_t = 3)]
    pub crossings: usize,
    /// Grid size of the CSV spectra.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct JmapArgs {
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ToeplitzArgs {
    /// Half width N; the circle has 2N+1 sites.
    #[arg(long, default_value_t = 10)]
    pub sites: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryArg {
    Periodic,
    Open,
}

#[derive(Args, Debug, Serialize)]
pub struct KitaevArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    /// Sites run from -N to N.
    #[arg(long, default_value_t = 20)]
    pub sites: usize,
    /// Disorder strength (operator norm).
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
    pub boundary: BoundaryArg,
    /// Model configuration file; replaces the model flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Number of fluxes in the CSV spectra.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PolarizationArgs {
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub m: f64,
    #[arg(long, default_value_t = 1)]
    pub winding: u32,
    #[arg(long, default_value_t = 24)]
    pub cells: usize,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu_fermi: f64,
    /// Onsite energy of the last orbital of the truncated chain.
    #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
    pub far_edge: f64,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Sf2Path(_) => "sf2-path",
            Command::Jmap(_) => "jmap",
            Command::Toeplitz(_) => "toeplitz",
            Command::KitaevFlux(_) => "kitaev-flux",
            Command::Defect(_) => "defect",
            Command::Polarization(_) => "polarization",
            Command::Validate(_) => "validate",
        }
    }

    fn config(&self, g: &GlobalOpts) -> serde_json::Value {
        let params = match self {
            Command::Sf2Path(a) => serde_json::to_value(a),
            Command::Jmap(a) => serde_json::to_value(a),
            Command::Toeplitz(a) => serde_json::to_value(a),
            Command::KitaevFlux(a) | Command::Defect(a) => serde_json::to_value(a),
            Command::Polarization(a) => serde_json::to_value(a),
            Command::Validate(a) => serde_json::to_value(a),
        };
        serde_json::json!({
            "tol": g.tol,
            "epsilon": g.epsilon,
            "params": params.unwrap_or(serde_json::Value::Null),
        })
    }

    fn run(&self, g: &GlobalOpts) -> Result<Outcome, CliError> {
        match self {
            Command::Sf2Path(a) => commands::sf2_path(a, g),
            Command::Jmap(a) => commands::jmap(a, g),
            Command::Toeplitz(a) => commands::toeplitz(a, g),
            Command::KitaevFlux(a) => commands::kitaev_flux(a, g),
            Command::Defect(a) => commands::defect(a, g),
            Command::Polarization(a) => commands::polarization(a, g),
            Command::Validate(a) => validate::run(a, g),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("Z2FLOW_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("Z2FLOW_THREADS = {v:?} is not a count")))?;
        if n > 0 {
            // only fails if a pool already exists, which is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let started = Instant::now();
    let command = cli.command.name();
    let config = cli.command.config(&cli.global);
    let outcome = configure_threads().and_then(|_| cli.command.run(&cli.global));
    let (report, code) = match outcome {
        Ok(out) => {
            let code = if out.failed { 2 } else { 0 };
            if let Err(e) = report::write_outputs(&cli.global, &out) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
            (Report::from_outcome(command, config, out, started), code)
        }
        Err(e) => {
            let code = e.exit_code();
            if code == 2 {
                eprintln!("refused: {e}");
            } else {
                eprintln!("error: {e}");
            }
            (Report::from_error(command, config, &e, started), code)
        }
    };
    match report::emit(&cli.global, &report, command != "validate" && code != 1) {
        Ok(()) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
