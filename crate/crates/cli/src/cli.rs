use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

/// Monte Carlo and closed-form experiments for distributed IRSs serving one
/// operator while sharing the environment with an out-of-band operator.
#[derive(Debug, Parser)]
#[command(name = "irs-sim", version)]
pub struct Cli {
    /// Scenario JSON; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the config's master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Directory for CSV and manifest output.
    #[arg(long, global = true, env = "IRS_SIM_OUT_DIR", default_value = "results")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ergodic sum-SE of both operators over an (N, S) grid.
    SweepSe(SweepArgs),
    /// OOB outage probability over an (S, delta) grid.
    Outage(OutageArgs),
    /// Pre-log factor of both operators over an (S, delta) grid at fixed N.
    Prelog(PrelogArgs),
    /// Element/IRS split that maximizes the OOB scaling.
    Design(DesignArgs),
    /// Runs the fast invariant suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Total element counts N.
    #[arg(long = "n", value_delimiter = ',', default_value = "64,128,256,512")]
    pub n: Vec<usize>,

    /// IRS counts; `star` picks the design-rule count for each N.
    #[arg(long = "s", value_delimiter = ',', default_value = "1,4,star")]
    pub s: Vec<IrsCount>,

    /// Slots per grid point; defaults to the config value.
    #[arg(long)]
    pub slots: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OutageArgs {
    /// Total element count N.
    #[arg(long = "n", default_value = "512")]
    pub n: usize,

    #[arg(long = "s", value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
    pub s: Vec<IrsCount>,

    /// Path-count exponents, L = round(N^delta). Fractions like `1/7` work.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.5")]
    pub delta: Vec<Fraction>,

    /// Outage threshold on |h|^2.
    #[arg(long, default_value = "0.5")]
    pub rho: f64,

    #[arg(long, default_value = "100000")]
    pub trials: u64,

    /// Keep the config's path loss instead of unit large-scale gains.
    #[arg(long)]
    pub physical: bool,
}

#[derive(Debug, Args)]
pub struct PrelogArgs {
    #[arg(long = "n", default_value = "128")]
    pub n: usize,

    /// IRS counts; `0` adds the no-IRS row and `star` the design point.
    #[arg(long = "s", value_delimiter = ',', default_value = "0,1,2,4,8,16,32,64")]
    pub s: Vec<IrsCount>,

    #[arg(long, value_delimiter = ',', default_value = "1/7,2/7,3/7")]
    pub delta: Vec<Fraction>,

    #[arg(long)]
    pub slots: Option<u64>,

    /// Keep the config's path loss and link budget instead of unit gains
    /// at 0 dB.
    #[arg(long)]
    pub physical: bool,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long = "n")]
    pub n: usize,

    #[arg(long = "l")]
    pub l: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Multiplies every check tolerance.
    #[arg(long, default_value = "1.0")]
    pub tol_scale: f64,
}

/// An IRS count or the design-rule placeholder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrsCount {
    Count(usize),
    Star,
}

impl FromStr for IrsCount {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("star") {
            return Ok(IrsCount::Star);
        }
        s.parse()
            .map(IrsCount::Count)
            .map_err(|_| format!("expected an integer or `star`, got `{s}`"))
    }
}

/// A decimal or `p/q` rational, kept with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Fraction {
    pub value: f64,
    pub text: String,
}

impl FromStr for Fraction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("expected a number or fraction, got `{s}`");
        let value = match s.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| bad())?;
                let q: f64 = q.trim().parse().map_err(|_| bad())?;
                p / q
            }
            None => s.parse().map_err(|_| bad())?,
        };
        if !value.is_finite() || value < 0.0 {
            return Err(format!("`{s}` must be finite and non-negative"));
        }
        Ok(Fraction { value, text: s.to_string() })
    }
}
