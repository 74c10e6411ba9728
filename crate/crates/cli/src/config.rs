use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polytors_core::graded::Stage;

use crate::CliError;

pub const DEFAULT_MAX_L: u64 = 1_000_000;
pub const MAX_L_ENV: &str = "POLYTORS_MAX_L";
pub const MAX_DEGREE_CAP: u64 = 10_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "polytors",
    version,
    about = "Integral homology of spaces of polynomials with bounded multiple roots"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homology of P_{k,n}^l, or of the stable space when --k inf.
    Homology(HomologyArgs),
    /// Higher p-torsion summands and the least k at which each appears.
    Torsion(TorsionArgs),
    /// Arnol'd's table of H_j(P_{k,2}^l), 2l+1 <= j <= 2l+5, for every k bracket.
    Table(TableArgs),
    /// Cross-check every torsion exponent against the binomial-valuation oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Md,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the result to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HomologyArgs {
    #[arg(long)]
    pub l: u64,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    /// Polynomial degree, or `inf` for the stable space.
    #[arg(long, default_value = "inf")]
    pub k: KArg,
    /// Restrict listed torsion to one prime (stable space only).
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub max_degree: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TorsionArgs {
    #[arg(long)]
    pub l: u64,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long)]
    pub p: Option<u64>,
    /// Also list runs dropped by the m = 0 rule.
    #[arg(long)]
    pub show_omitted: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub l: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A value `a` or an inclusive range `a..b`.
    #[arg(long)]
    pub l: Span,
    /// Primes in this inclusive range are checked.
    #[arg(long, default_value = "2..31")]
    pub p: Span,
    /// Treat the documented m = 0 ambiguity as a failure.
    #[arg(long)]
    pub strict: bool,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KArg {
    Finite(u64),
    Inf,
}

impl FromStr for KArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "∞" => Ok(KArg::Inf),
            _ => s
                .parse()
                .map(KArg::Finite)
                .map_err(|_| format!("expected a positive integer or `inf`, got `{s}`")),
        }
    }
}

impl From<KArg> for Stage {
    fn from(k: KArg) -> Stage {
        match k {
            KArg::Finite(k) => Stage::Finite(k),
            KArg::Inf => Stage::Stable,
        }
    }
}

/// Inclusive integer range written `a..b`, `a..=b`, or a single `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span(pub RangeInclusive<u64>);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("`{t}` is not a nonnegative integer"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        Ok(Span(lo..=hi))
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.0.start(), self.0.end())
    }
}

/// Cap on `l`, from `POLYTORS_MAX_L` when set.
pub fn max_l() -> Result<u64, CliError> {
    match std::env::var(MAX_L_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_L_ENV} must be an integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_MAX_L),
    }
}

pub fn check_l(l: u64) -> Result<(), CliError> {
    if l == 0 {
        return Err(CliError::Usage(
            "l = 0 is the classical configuration-space case, which carries no higher torsion of this kind; use l >= 1".into(),
        ));
    }
    let cap = max_l()?;
    if l > cap {
        return Err(CliError::Usage(format!(
            "l = {l} exceeds the cap {cap} (set {MAX_L_ENV} to raise it)"
        )));
    }
    Ok(())
}

pub fn check_n(n: u32) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}
