//! `shearcount`: lattice-point counts, mean squares, spectra and sweeps for
//! the shear lattices `Λ_{x+iy}`.
//!
//! Exit codes: 0 success, 1 usage error, 2 count with ties, 3 range
//! exceeded, 4 verification failure.

mod commands;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub(crate) const EXIT_OK: u8 = 0;
pub(crate) const EXIT_USAGE: u8 = 1;
pub(crate) const EXIT_TIES: u8 = 2;
pub(crate) const EXIT_RANGE: u8 = 3;
pub(crate) const EXIT_VERIFY: u8 = 4;

const THREADS_ENV: &str = "SHEARCOUNT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "shearcount",
    version,
    about = "Lattice points in circles for the shear family of unimodular lattices"
)]
struct Cli {
    /// Worker threads; defaults to $SHEARCOUNT_THREADS, then the number of CPUs.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count lattice points strictly inside the circle of radius T.
    Count(commands::CountArgs),
    /// Mean and mean square of the remainder over the shear period.
    Meansquare(commands::MeansquareArgs),
    /// Mean-square table over a grid of heights and radii.
    Sweep(commands::SweepArgs),
    /// Cosine coefficients of the oscillatory term.
    Spectrum(commands::SpectrumArgs),
    /// Randomized self-check of the identities and bounds.
    Verify(verify::VerifyArgs),
}

fn thread_count(flag: Option<u64>) -> Result<usize, String> {
    if let Some(n) = flag {
        return Ok(n as usize);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
        Err(std::env::VarError::NotPresent) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Err(e) => Err(format!("{THREADS_ENV}: {e}")),
    }
}

fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let threads = match thread_count(cli.threads) {
        Ok(n) => n,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return EXIT_USAGE;
        }
    };
    pool.install(|| match cli.command {
        Command::Count(a) => commands::count(a),
        Command::Meansquare(a) => commands::meansquare(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Verify(a) => verify::verify(a),
    })
}

fn main() -> ExitCode {
    ExitCode::from(run())
}
