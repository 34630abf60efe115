use clap::{Args, Parser, Subcommand, ValueEnum};

use spherical_points::archimedean::DEFAULT_SEED;
use spherical_points::counting::{FiberKey, DEFAULT_WORK_BUDGET};
use spherical_points::{parse_rational, Boundary, Polarization, Setup};

#[derive(Debug, Parser)]
#[command(
    name = "spherical-points",
    version,
    about = "Integral points of bounded height: exact counts and predicted asymptotics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub output: Format,

    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, env = "SPHERICAL_POINTS_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Report wall-clock time of each count.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact number of integral points of height at most B.
    Count {
        #[command(flatten)]
        setup: SetupArgs,
        #[arg(long = "B", value_name = "B", value_parser = parse_bound)]
        bound: u64,
        /// Also run the scan-based oracle and require agreement.
        #[arg(long)]
        check: bool,
        /// Largest number of tuple tests the oracle may perform.
        #[arg(long, default_value_t = DEFAULT_WORK_BUDGET)]
        work_budget: u64,
    },
    /// Invariants and the predicted leading constant.
    Constants {
        #[command(flatten)]
        setup: SetupArgs,
        /// Also estimate omega_inf by Monte Carlo with this many samples.
        #[arg(long)]
        monte_carlo: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Exact counts against the prediction.
    Compare {
        #[command(flatten)]
        setup: SetupArgs,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Point counts and local densities over F_p.
    FpCheck {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        n: u32,
        #[arg(long, default_value_t = 11)]
        p_max: u64,
    },
    /// Points on one fiber of (a:c:z) against its predicted share.
    Fiber {
        #[command(flatten)]
        setup: SetupArgs,
        /// Fiber key `a:c:z`.
        #[arg(long, value_parser = parse_fiber)]
        fiber: FiberKey,
        #[command(flatten)]
        bounds: Bounds,
    },
}

#[derive(Debug, Args)]
pub struct SetupArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub n: u32,
    #[arg(long, value_enum)]
    pub boundary: BoundaryArg,
    /// Exact rational, `p` or `p/q`.
    #[arg(long)]
    pub l1: String,
    #[arg(long)]
    pub l2: String,
}

impl SetupArgs {
    pub fn setup(&self) -> spherical_points::Result<Setup> {
        let pol = Polarization::new(parse_rational(&self.l1)?, parse_rational(&self.l2)?)?;
        Setup::new(self.n, self.boundary.into(), pol)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundaryArg {
    W,
    Wz,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::W => Boundary::Dw,
            BoundaryArg::Wz => Boundary::DwDz,
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Bounds {
    #[arg(long = "B", value_name = "B", value_parser = parse_bound)]
    pub bound: Option<u64>,
    /// Comma-separated, strictly ascending.
    #[arg(long = "B-list", value_name = "B,...", value_delimiter = ',', value_parser = parse_bound)]
    pub list: Option<Vec<u64>>,
}

impl Bounds {
    pub fn to_vec(&self) -> Vec<u64> {
        match (&self.bound, &self.list) {
            (Some(b), _) => vec![*b],
            (None, Some(l)) => l.clone(),
            (None, None) => Vec::new(),
        }
    }
}

/// Positive integer, in decimal or as `m` or `me k` with an exact integer
/// value (`1e6`, `2.5e3`).
pub fn parse_bound(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let bad = || format!("'{s}' is not a positive integer");
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<u32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let frac = frac.trim_end_matches('0');
    let shift = exp.checked_sub(frac.len() as u32).ok_or_else(bad)?;
    let digits: u64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let v = 10u64.checked_pow(shift).and_then(|p| digits.checked_mul(p)).ok_or_else(bad)?;
    if v == 0 {
        return Err(bad());
    }
    Ok(v)
}

fn parse_fiber(s: &str) -> Result<FiberKey, String> {
    FiberKey::parse(s).map_err(|e| e.to_string())
}
