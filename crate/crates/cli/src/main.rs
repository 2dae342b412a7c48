//! Batch front-end for the `mzlaw` library.
//!
//! Exit codes: 0 on success, 1 when a computation or check fails, 2 on
//! usage and configuration errors.

mod experiment;
mod verify;

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use mzlaw::io_store::{samples_table, write_csv, Cell, ProfileCache, Table};
use mzlaw::mzdist::{check_dimension, MZDistribution, Sector};
use mzlaw::Error;

#[derive(Parser)]
#[command(
    name = "mzlaw",
    version,
    about = "Limit distribution of scattering resonances and its numerical checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity suite for the limit distribution.
    Verify {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also write the check table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the angular profile and its derivatives.
    HdTable {
        #[arg(long)]
        d: u32,
        /// Number of equispaced angles in [0, pi].
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mass of a sector of the lower unit half-disc.
    SectorMass {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        theta1: f64,
        #[arg(long)]
        theta2: f64,
        #[arg(long, value_enum)]
        convention: Option<Convention>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the resonances of the potential in a config file.
    Resonances {
        #[arg(long)]
        config: PathBuf,
        /// Cross-check the l = 0 channel against the s-wave matching
        /// condition (d = 3, one shell).
        #[arg(long)]
        oracle: bool,
        /// Output directory; defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weak-convergence report, distances and rate fits over the config's
    /// radius grid.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw samples from the limit distribution on the lower unit half-disc.
    Sample {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    /// One-sided derivatives at the axis.
    Lemma,
    /// Zero endpoint terms at the axis.
    Corollary,
}

/// A usage or configuration problem detected by the front-end itself.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// A numerical check that ran to completion but did not pass.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn is_usage(e: &Error) -> bool {
    match e {
        Error::InvalidDimension(_)
        | Error::InvalidArgument(_)
        | Error::OutOfRange { .. }
        | Error::Config { .. }
        | Error::Schema { .. }
        | Error::Io(_) => true,
        Error::Channel { source, .. } => is_usage(source),
        _ => false,
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<Usage>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return if is_usage(err) { 2 } else { 1 };
        }
    }
    1
}

fn check_tol(tol: f64) -> anyhow::Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Usage(format!("--tol must be positive, got {tol}")).into());
    }
    Ok(())
}

/// Distribution for `(d, tol)` through the profile cache.
pub fn distribution(d: u32, tol: f64) -> anyhow::Result<MZDistribution> {
    check_dimension(d)?;
    check_tol(tol)?;
    let cache = ProfileCache::from_env();
    Ok(cache.load_or_build(d, tol)?)
}

/// Write to `out`, or print to stdout when no path is given.
fn emit(table: &Table, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => {
            write_csv(table, p).with_context(|| format!("writing {}", p.display()))?;
            log::info!("wrote {}", p.display());
        }
        None => print!("{}", table.to_csv_string()?),
    }
    Ok(())
}

fn hd_table(d: u32, n: usize, tol: f64, out: Option<&Path>) -> anyhow::Result<()> {
    if n < 2 {
        return Err(Usage(format!("--n must be at least 2, got {n}")).into());
    }
    let dist = distribution(d, tol)?;
    let p = &dist.profile;
    let mut t = Table::new(&["theta", "h", "dh", "ddh", "angular_factor"]);
    for i in 0..n {
        let theta = if i + 1 == n { PI } else { PI * i as f64 / (n - 1) as f64 };
        t.push(vec![
            Cell::Float(theta),
            Cell::Float(p.h(theta)),
            Cell::Float(p.dh(theta)),
            Cell::Float(p.ddh(theta)),
            Cell::Float(p.angular_factor(theta)),
        ]);
    }
    emit(&t, out)
}

fn sector_mass(
    d: u32,
    theta1: f64,
    theta2: f64,
    convention: Option<Convention>,
    tol: f64,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let s = Sector::new(theta1, theta2).map_err(|e| Usage(e.to_string()))?;
    let dist = distribution(d, tol)?;
    let lemma = dist.sector_mass(s);
    let corollary = dist.corollary_coefficient(s);
    let mut t = Table::new(&["convention", "theta1", "theta2", "mass"]);
    let mut row = |name: &str, v: f64| {
        t.push(vec![
            Cell::Text(name.to_string()),
            Cell::Float(theta1),
            Cell::Float(theta2),
            Cell::Float(v),
        ])
    };
    match convention {
        Some(Convention::Lemma) => row("lemma", lemma),
        Some(Convention::Corollary) => row("corollary", corollary),
        None => {
            row("lemma", lemma);
            if corollary != lemma {
                row("corollary", corollary);
            }
        }
    }
    emit(&t, out)
}

fn sample(d: u32, n: usize, seed: u64, tol: f64, out: Option<&Path>) -> anyhow::Result<()> {
    if n == 0 {
        return Err(Usage("--n must be at least 1".into()).into());
    }
    let dist = distribution(d, tol)?;
    emit(&samples_table(&dist.sample(n, seed)), out)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Verify { d, tol, out } => verify::run(d, tol, out.as_deref()),
        Command::HdTable { d, n, tol, out } => hd_table(d, n, tol, out.as_deref()),
        Command::SectorMass {
            d,
            theta1,
            theta2,
            convention,
            tol,
            out,
        } => sector_mass(d, theta1, theta2, convention, tol, out.as_deref()),
        Command::Resonances { config, oracle, out } => experiment::resonances(&config, oracle, out.as_deref()),
        Command::Converge { config, out } => experiment::converge(&config, out.as_deref()),
        Command::Sample { d, n, seed, tol, out } => sample(d, n, seed, tol, out.as_deref()),
    }
}

/// Compact form for console summaries; files use [`fmt_float`].
pub fn short(x: f64) -> String {
    if x == 0.0 || (1e-3..1e6).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        format!("{x:.5e}")
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
