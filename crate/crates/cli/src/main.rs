//! `hardy`: runs one experiment per subcommand and writes `report.json` plus
//! CSV tables into the output directory.
//!
//! Exit codes: 0 success, 2 invalid configuration or parameters, 3 solver
//! failure, 4 acceptance failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardy_core::acceptance::Preset;
use hardy_core::HardyError;

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Experiments for the Hardy-potential operator Δ + μ/δ²")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment configuration; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mu: Option<f64>,
    /// Absorption exponent, or a comma-separated list for `critical-scan`.
    #[arg(long, value_delimiter = ',')]
    q: Vec<f64>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Output directory (default: `$HARDY_OUTPUT_ROOT/<subcommand>`, else `hardy-out/<subcommand>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the report to stdout as well.
    #[arg(long)]
    print: bool,
}

#[derive(Subcommand)]
enum Command {
    /// α±, q_crit.
    Exponents(Common),
    /// Discrete Hardy constant, principal eigenpair, boundary exponent.
    Spectral(Common),
    /// Green column and Green estimate bracket.
    Green(Common),
    /// Martin column, brackets and normalized masses.
    Martin(Common),
    /// Weak-L^p regularizing estimates over the standard measure families.
    Weaklp(Common),
    /// Normalized trace of 𝔾[τ] + 𝕂[ν].
    Trace(Common),
    /// Linear problem with weak-formulation residuals.
    Linear(Common),
    /// Absorption problem -L_μ u + u^q = 0 with trace ν.
    Nonlinear(Common),
    /// Boundary profile of the solution with ν = kδ_y.
    Dirac(Common),
    /// Cone integrals and trace retention over a list of q.
    CriticalScan(Common),
    /// The acceptance suite.
    VerifyAll {
        #[command(flatten)]
        common: Common,
        /// `desk` (full) or `smoke` (small grids).
        #[arg(long, default_value = "desk")]
        preset: String,
        /// Subset of criteria, e.g. `1,5,7`.
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Exponents(_) => "exponents",
            Command::Spectral(_) => "spectral",
            Command::Green(_) => "green",
            Command::Martin(_) => "martin",
            Command::Weaklp(_) => "weaklp",
            Command::Trace(_) => "trace",
            Command::Linear(_) => "linear",
            Command::Nonlinear(_) => "nonlinear",
            Command::Dirac(_) => "dirac",
            Command::CriticalScan(_) => "critical-scan",
            Command::VerifyAll { .. } => "verify-all",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Exponents(c)
            | Command::Spectral(c)
            | Command::Green(c)
            | Command::Martin(c)
            | Command::Weaklp(c)
            | Command::Trace(c)
            | Command::Linear(c)
            | Command::Nonlinear(c)
            | Command::Dirac(c)
            | Command::CriticalScan(c) => c,
            Command::VerifyAll { common, .. } => common,
        }
    }
}

const VALIDATION: u8 = 2;
const SOLVER: u8 = 3;
const ACCEPTANCE: u8 = 4;

fn fail(code: u8, kind: &str, message: String, detail: Option<String>) -> ExitCode {
    let payload = serde_json::json!({ "error": kind, "message": message, "detail": detail });
    eprintln!("{payload}");
    ExitCode::from(code)
}

fn exit_code(e: &HardyError) -> u8 {
    match e {
        HardyError::Domain(_)
        | HardyError::Collar { .. }
        | HardyError::Range { .. }
        | HardyError::Parameter(_)
        | HardyError::GridMismatch(_)
        | HardyError::Indefinite { .. }
        | HardyError::NotANode { .. } => VALIDATION,
        _ => SOLVER,
    }
}

fn configure(cmd: &Command) -> Result<ExperimentConfig, String> {
    let common = cmd.common();
    let mut c = config::load(common.config.as_deref())?;
    if let Some(mu) = common.mu {
        c.physics.mu = mu;
    }
    match (cmd, common.q.as_slice()) {
        (_, []) => {}
        (Command::CriticalScan(_), qs) => c.run.q_list = qs.to_vec(),
        (_, [q]) => c.physics.q = *q,
        _ => return Err("--q takes a single value here".into()),
    }
    if let Some(r) = common.resolution {
        c.domain.resolution = r;
    }
    if let Some(n) = common.dim {
        c.domain.dim = n;
    }
    if let Some(o) = &common.out {
        c.run.output = Some(o.display().to_string());
    }
    c.validate()?;
    Ok(c)
}

fn output_dir(c: &ExperimentConfig, name: &str) -> PathBuf {
    match &c.run.output {
        Some(o) => PathBuf::from(o),
        None => std::env::var_os("HARDY_OUTPUT_ROOT")
            .map_or_else(|| PathBuf::from("hardy-out"), PathBuf::from)
            .join(name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let cfg = match configure(&cli.command) {
        Ok(c) => c,
        Err(m) => return fail(VALIDATION, "validation", m, None),
    };
    let outcome = match &cli.command {
        Command::Exponents(_) => commands::exponents_cmd(&cfg),
        Command::Spectral(_) => commands::spectral_cmd(&cfg),
        Command::Green(_) => commands::green_cmd(&cfg),
        Command::Martin(_) => commands::martin_cmd(&cfg),
        Command::Weaklp(_) => commands::weaklp_cmd(&cfg),
        Command::Trace(_) => commands::trace_cmd(&cfg),
        Command::Linear(_) => commands::linear_cmd(&cfg),
        Command::Nonlinear(_) => commands::nonlinear_cmd(&cfg),
        Command::Dirac(_) => commands::dirac_cmd(&cfg),
        Command::CriticalScan(_) => commands::critical_scan_cmd(&cfg),
        Command::VerifyAll { preset, criteria, .. } => {
            let Some(mut p) = Preset::by_name(preset) else {
                return fail(VALIDATION, "validation", format!("unknown preset {preset}"), None);
            };
            if let Some(mu) = cli.command.common().mu {
                p.mu = mu;
            }
            if let Some(r) = cli.command.common().resolution {
                p.resolution = r;
            }
            let ids = if criteria.is_empty() { (1..=12).collect() } else { criteria.clone() };
            if let Some(bad) = ids.iter().find(|i| !(1..=12).contains(*i)) {
                return fail(VALIDATION, "validation", format!("no criterion {bad}"), None);
            }
            commands::verify_all_cmd(&p, &ids)
        }
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return fail(exit_code(&e), name, e.to_string(), Some(format!("{e:?}"))),
    };
    let dir = output_dir(&cfg, name);
    if let Err(e) = output::write_all(&dir, name, &cfg, &outcome.result, &outcome.tables) {
        return fail(SOLVER, "io", format!("{}: {e}", dir.display()), None);
    }
    if cli.command.common().print || matches!(cli.command, Command::Exponents(_)) {
        println!("{}", serde_json::to_string_pretty(&outcome.result).unwrap_or_default());
    }
    if outcome.failed {
        ExitCode::from(ACCEPTANCE)
    } else {
        ExitCode::SUCCESS
    }
}
