//! `fracext`: reproducible runs of the fractional extension experiments.
//!
//! Exit codes: 0 success (including inconclusive verdicts), 1 failed assertion,
//! 2 usage error, 3 malformed input data.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::analysis::{BilinearArgs, SmoothingArgs};
use commands::conv2d::Conv2dCmd;
use commands::geometry::GeometryCmd;
use commands::strichartz::{AsymptoticArgs, LedgerArgs, OptimizeArgs, QuotientArgs};
use commands::{Ctx, Failures};
use config::Config;
use error::CliError;
use output::Run;

#[derive(Parser, Debug)]
#[command(name = "fracext", version, about = "Fractional Fourier extension experiments")]
struct Cli {
    /// RNG seed for samplers and optimizer restarts [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    out_dir: Option<String>,
    /// Worker thread cap, 0 for all cores [default: 0]. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Strichartz quotient of one trial function.
    Quotient(QuotientArgs),
    /// Maximize the quotient over a trial family.
    Optimize(OptimizeArgs),
    /// Large-frequency limit against the Schrödinger quotient.
    Asymptotic(AsymptoticArgs),
    /// Decomposition geometry scans.
    #[command(subcommand)]
    Geometry(GeometryCmd),
    /// Bilinear ratio along a ladder of cube scales.
    Bilinear(BilinearArgs),
    /// Local smoothing under frequency modulation and the sphere-kernel decay.
    Smoothing(SmoothingArgs),
    /// Mass and Strichartz splitting defects along an escape ladder.
    Ledger(LedgerArgs),
    /// Radial convolution pipeline for d = 2.
    #[command(subcommand)]
    Conv2d(Conv2dCmd),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Quotient(_) => "quotient",
            Self::Optimize(_) => "optimize",
            Self::Asymptotic(_) => "asymptotic",
            Self::Geometry(c) => commands::geometry::command_name(c),
            Self::Bilinear(_) => "bilinear",
            Self::Smoothing(_) => "smoothing",
            Self::Ledger(_) => "ledger",
            Self::Conv2d(c) => commands::conv2d::command_name(c),
        }
    }
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> Result<Failures, CliError> {
    match cmd {
        Command::Quotient(a) => commands::strichartz::quotient(a, ctx),
        Command::Optimize(a) => commands::strichartz::optimize(a, ctx),
        Command::Asymptotic(a) => commands::strichartz::asymptotic(a, ctx),
        Command::Geometry(c) => commands::geometry::run(c, ctx),
        Command::Bilinear(a) => commands::analysis::bilinear(a, ctx),
        Command::Smoothing(a) => commands::analysis::smoothing(a, ctx),
        Command::Ledger(a) => commands::strichartz::ledger(a, ctx),
        Command::Conv2d(c) => commands::conv2d::run(c, ctx),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    let seed = cfg.get("seed", cli.seed, 0u64)?;
    let threads = cfg.get("threads", cli.threads, 0usize)?;
    let out_dir = cfg.get("out-dir", cli.out_dir, "out".to_string())?;
    // runtime-only: neither changes a single output number
    cfg.forget("threads");
    cfg.forget("out-dir");
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;

    let name = cli.command.name();
    let run = Run::new(name, std::env::args().collect(), out_dir.as_ref(), seed, threads)?;
    let mut ctx = Ctx { cfg, run, seed };
    let failures = dispatch(cli.command, &mut ctx)?;
    let Ctx { cfg, run, .. } = ctx;
    run.finish(&cfg)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // clap exits 2 on usage errors and 0 for --help / --version
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fracext: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
