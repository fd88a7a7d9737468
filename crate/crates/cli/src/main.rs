//! `fdprofile`: solve, check and sweep radial self-similar profiles.
//!
//! Exit status: 0 success, 1 configuration or domain error, 2 failed
//! verification or bad bracket, 3 solver failure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{exit, Failure};
use config::{Axis, Bracket, RunConfig};

#[derive(Parser)]
#[command(name = "fdprofile", version, about = "Radial self-similar profiles of the fast diffusion equation")]
struct Cli {
    /// ODE tolerance [default: 1e-9]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Outer radius; for far-field solves, of the inverted profile [default: 100]
    #[arg(long, global = true)]
    rmax: Option<f64>,
    /// Output directory [default: .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// INI file of default values keyed by flag name
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<f64>,
    /// [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    rho1: Option<f64>,
    /// [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Profile with prescribed value f(0) = eta0
    SolveOrigin {
        #[command(flatten)]
        params: ParamArgs,
        /// [default: 1]
        #[arg(long)]
        eta0: Option<f64>,
    },
    /// Profile with r^((n-2)/m) f(r) -> eta at infinity
    SolveFarfield {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Search for the beta with fast decay of the origin profile
    BetaFind {
        #[command(flatten)]
        params: ParamArgs,
        /// [default: 1]
        #[arg(long)]
        eta0: Option<f64>,
        /// LO,HI [default: the admissible window shrunk by 1% at each end]
        #[arg(long, allow_hyphen_values = true)]
        bracket: Option<Bracket>,
        /// [default: 1e-4]
        #[arg(long)]
        tol_beta: Option<f64>,
    },
    /// Re-check a stored profile CSV against its report.json
    Verify {
        /// Profile CSV (r,f,f_r or r,g,g_r)
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Sidecar report [default: report.json next to the profile]
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Solve every tuple of a parameter grid
    Sweep {
        /// origin or far-field [default: origin]
        #[arg(long)]
        kind: Option<String>,
        /// Dimensions, comma separated [default: 4]
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<u32>>,
        /// LO,HI,COUNT
        #[arg(long, allow_hyphen_values = true)]
        m_range: Option<Axis>,
        /// LO,HI,COUNT
        #[arg(long, allow_hyphen_values = true)]
        beta_range: Option<Axis>,
        /// [default: 1]
        #[arg(long)]
        rho1: Option<f64>,
        /// eta0 or eta of every tuple [default: 1]
        #[arg(long)]
        boundary: Option<f64>,
        /// Worker threads [default: all cores]
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn with_params(cfg: RunConfig, p: ParamArgs) -> RunConfig {
    RunConfig { n: p.n, m: p.m, rho1: p.rho1, beta: p.beta, ..cfg }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let globals = RunConfig { tol: cli.tol, rmax: cli.rmax, out: cli.out, ..Default::default() };
    let (flags, action): (RunConfig, fn(&RunConfig) -> commands::Outcome) = match cli.command {
        Command::SolveOrigin { params, eta0 } => {
            (with_params(RunConfig { eta0, ..globals }, params), commands::solve_origin_cmd)
        }
        Command::SolveFarfield { params, eta } => {
            (with_params(RunConfig { eta, ..globals }, params), commands::solve_farfield_cmd)
        }
        Command::BetaFind { params, eta0, bracket, tol_beta } => (
            with_params(RunConfig { eta0, bracket, tol_beta, ..globals }, params),
            commands::beta_find_cmd,
        ),
        Command::Verify { profile, report } => (RunConfig { profile, report, ..globals }, commands::verify_cmd),
        Command::Sweep { kind, n_values, m_range, beta_range, rho1, boundary, jobs } => (
            RunConfig { kind, n_values, m_range, beta_range, rho1, boundary, jobs, ..globals },
            commands::sweep_cmd,
        ),
    };
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = flags.over(file);
    if !(cfg.tol() > 0.0) {
        return Err(Failure::usage(format!("tol = {} violates tol > 0", cfg.tol())));
    }
    if !(cfg.rmax() > 0.0) {
        return Err(Failure::usage(format!("rmax = {} violates rmax > 0", cfg.rmax())));
    }
    action(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
