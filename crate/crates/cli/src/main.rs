//! `orbitcodes`: analyses, censuses and oracle runs for cyclic orbit codes.
//!
//! Exit codes: 0 all checks pass, 1 verification mismatch, 2 usage or parse
//! error, 3 work budget or table limit exceeded.

mod analyze;
mod census;
mod error;
mod field;
mod frobenius;
mod oracle;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use orbitcodes::census::{VerifyLevel, DEFAULT_BUDGET};

use crate::error::{CliError, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
use crate::output::{render, Format, Report};

#[derive(Debug, Parser)]
#[command(name = "orbitcodes", version, about = "Cyclic orbit subspace codes over finite fields")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Work budget; runs that would exceed it are refused with exit code 3.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = parse_budget)]
    budget: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Describe F_{p^{hn}} and optionally evaluate field operations.
    Field(field::FieldCmd),
    /// Orbit profile, linear-set weights, structural checks and bounds of one subspace.
    Analyze(analyze::AnalyzeCmd),
    /// Census of all codes Orb(U_{s,γ}) in F_{q^{2k}}.
    CensusUsg(census::CensusCmd),
    /// Frobenius-automorphism groups and Frobenius orbits of the U_{s,γ} family.
    Frobenius(frobenius::FrobeniusCmd),
    /// Run a brute-force oracle against the fast path.
    Oracle(oracle::OracleCmd),
}

/// `F_{p^{hn}}` as seen over `F_q`, `q = p^h`.
#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub h: u32,
    #[arg(long)]
    pub n: u32,
    /// Modulus coefficients over F_p, constant term first, leading 1 last.
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
}

/// The `U_{s,γ}` family in `F_{q^{2k}}`, `q = p^h`.
#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long, default_value_t = 1)]
    pub h: u32,
    #[arg(long)]
    pub k: u32,
    /// Modulus of F_{p^{2hk}}, constant term first, leading 1 last.
    #[arg(long, value_delimiter = ',')]
    pub modulus: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Verify {
    None,
    Fast,
    Brute,
}

impl From<Verify> for VerifyLevel {
    fn from(v: Verify) -> Self {
        match v {
            Verify::None => VerifyLevel::None,
            Verify::Fast => VerifyLevel::Fast,
            Verify::Brute => VerifyLevel::Brute,
        }
    }
}

/// Accepts plain integers and `AeB` shorthand; zero is rejected.
fn parse_budget(s: &str) -> Result<u128, String> {
    let v = match s.split_once(['e', 'E']) {
        Some((a, b)) => {
            let a: u128 = a.parse().map_err(|_| format!("bad mantissa in {s:?}"))?;
            let b: u32 = b.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            10u128.checked_pow(b).and_then(|x| x.checked_mul(a)).ok_or("budget overflows")?
        }
        None => s.parse().map_err(|_| format!("not an integer: {s:?}"))?,
    };
    if v == 0 {
        return Err("budget must be positive".into());
    }
    Ok(v)
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let budget = cli.budget;
    match &cli.command {
        Command::Field(c) => field::run(c),
        Command::Analyze(c) => analyze::run(c, budget),
        Command::CensusUsg(c) => census::run(c, budget),
        Command::Frobenius(c) => frobenius::run(c, budget),
        Command::Oracle(c) => oracle::run(c, budget),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("usage: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if let Err(e) = render(&report, cli.format, &mut lock).and_then(|_| lock.flush().map_err(|e| CliError::Io(e.to_string()))) {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    for f in &report.failures {
        eprintln!("mismatch: {f}");
    }
    ExitCode::from(if report.failures.is_empty() { EXIT_OK } else { EXIT_MISMATCH })
}
