//! `kfpq`: parameter sweeps over the closed forms and oracles of `kfpq-core`,
//! and the acceptance runner.

mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::AppError;
use config::{CommonArgs, SweepConfig};
use kfpq_core::acceptance::run_all;

#[derive(Debug, Parser)]
#[command(name = "kfpq", version, about = "Sweeps and acceptance checks for quadratic Kramers-Fokker-Planck models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact semigroup norm, Argsh and eigenvalue routes, or the Galerkin oracle with --dims.
    Norms(CommonArgs),
    /// Positivity threshold delta0(t) and its ratio to nu t^3/12.
    Delta0(CommonArgs),
    /// Smallest eigenvalue of the compressed Hermitian difference, closed form and 4x4 flows.
    Positivity(CommonArgs),
    /// Weighted Bargmann quotient, its direct optimization and the remainder bound.
    Bargmann(CommonArgs),
    /// Resolvent integral against its logarithmic bound.
    Resolvent(CommonArgs),
    /// Rayleigh quotient of the optimality witness, closed form and grid.
    Optimality(CommonArgs),
    /// Degenerate model decay, or its |D_q| Galerkin curve with --dims.
    Degenerate(CommonArgs),
    /// Truncated subelliptic constant for signed curvatures.
    Subelliptic(CommonArgs),
    /// Runs the acceptance suite.
    VerifyAll(CommonArgs),
}

fn emit(cfg: &SweepConfig, table: &table::Table) -> Result<(), AppError> {
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(cfg.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            table.write(cfg.format, stdout.lock())?;
        }
    }
    Ok(())
}

fn verify_all(cfg: &SweepConfig) -> Result<bool, AppError> {
    let mut out = io::stdout().lock();
    let mut all = true;
    for r in run_all(cfg.seed) {
        writeln!(out, "{}", r.line())?;
        out.flush()?;
        eprintln!("criterion {:>2}: {:.2} s (limit {} s)", r.id, r.elapsed.as_secs_f64(), r.runtime_limit.as_secs());
        all &= r.passed;
    }
    writeln!(out, "{}", if all { "ALL PASS" } else { "SOME FAILED" })?;
    Ok(all)
}

fn run(cli: Cli) -> Result<ExitCode, AppError> {
    let (args, f): (&CommonArgs, fn(&SweepConfig) -> Result<table::Table, AppError>) = match &cli.command {
        Command::Norms(a) => (a, commands::norms),
        Command::Delta0(a) => (a, commands::delta0_table),
        Command::Positivity(a) => (a, commands::positivity),
        Command::Bargmann(a) => (a, commands::bargmann),
        Command::Resolvent(a) => (a, commands::resolvent),
        Command::Optimality(a) => (a, commands::optimality),
        Command::Degenerate(a) => (a, commands::degenerate),
        Command::Subelliptic(a) => (a, commands::subelliptic),
        Command::VerifyAll(a) => {
            let cfg = SweepConfig::resolve(a)?;
            return Ok(if verify_all(&cfg)? { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    };
    let cfg = SweepConfig::resolve(args)?;
    emit(&cfg, &f(&cfg)?)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kfpq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
