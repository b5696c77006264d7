use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperlat::Method;

/// Lattice points under elementary symmetric polynomial constraints.
///
/// Every flag marked with an environment variable falls back to it, then to
/// the built-in default.
#[derive(Debug, Parser)]
#[command(name = "hyperlat", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "HYPERLAT_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: Option<u32>,

    /// Directory for the persistent count cache.
    #[arg(long, global = true, env = "HYPERLAT_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Node budget for one exact count.
    #[arg(long, global = true, env = "HYPERLAT_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,

    #[arg(long, global = true, env = "HYPERLAT_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write results here instead of stdout.
    #[arg(long, short, global = true, env = "HYPERLAT_OUTPUT")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct RegionArgs {
    /// Degree l of the elementary symmetric polynomial.
    #[arg(long = "l", value_parser = clap::value_parser!(u32).range(1..))]
    pub ell: u32,
    /// Dimension r.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub r: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct SeedArg {
    #[arg(long, env = "HYPERLAT_SEED", default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct ModelArgs {
    /// Prime cutoff P of the truncated Euler product.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(2..))]
    pub prime_cutoff: u64,
    /// Cap J on the per-prime exponents.
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..))]
    pub exponent_cap: u32,
    #[arg(long, default_value_t = 1e-6, value_parser = positive_f64)]
    pub tolerance: f64,
}

pub fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive finite number, got {s:?}")),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if (0.0..=1.0).contains(&x) => Ok(x),
        _ => Err(format!("expected a number in [0, 1], got {s:?}")),
    }
}

fn nonnegative_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a nonnegative finite number, got {s:?}")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact |H_{l,r}(n)|, optionally with divisibility or a product cap.
    Count {
        #[command(flatten)]
        region: RegionArgs,
        /// Require mu_k | i_k, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',', conflicts_with = "cap")]
        mu: Option<Vec<u64>>,
        /// Require i_1 ... i_r <= B, e.g. `10` or `7/2`.
        #[arg(long)]
        cap: Option<String>,
    },
    /// Exact count of the region with coordinates scaled by t_k.
    CountScaled {
        #[command(flatten)]
        region: RegionArgs,
        /// Positive rationals, e.g. `1/2,3,1`.
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<String>,
    },
    /// Exact uniform draws from the region.
    Sample {
        #[command(flatten)]
        region: RegionArgs,
        /// Number of draws.
        #[arg(long, short = 'm', value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long, default_value = "conditional-count")]
        method: Method,
        /// Write the points as CSV here, with metadata beside it.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Limit law of the GCD, optionally against sampled frequencies.
    GcdDist {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        r: u32,
        /// Largest GCD value listed.
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        max_value: u64,
        /// Sample from H_{l,r}(n); needs --n.
        #[arg(long = "l", requires = "n", value_parser = clap::value_parser!(u32).range(1..))]
        ell: Option<u32>,
        #[arg(long, requires = "ell", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long, short = 'm', default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Moment E[L_r^beta] of the LCM ratio limit, optionally against sampled
    /// E[(LCM / n^{r/l})^beta].
    LcmMoment {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        r: u32,
        #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
        beta: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "l", requires = "n", value_parser = clap::value_parser!(u32).range(1..))]
        ell: Option<u32>,
        #[arg(long, requires = "ell", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long, short = 'm', default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Volume of {e_l(y) <= 1, y >= 0} estimated from an exact count.
    Volume {
        #[arg(long = "l", value_parser = clap::value_parser!(u32).range(1..))]
        ell: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        r: u32,
        /// Approximation parameter n of the count.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
    /// Distribution function of the product limit U_{l,r} at x.
    UCdf {
        #[arg(long = "l", value_parser = clap::value_parser!(u32).range(1..))]
        ell: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        r: u32,
        #[arg(long, value_parser = nonnegative_f64)]
        x: f64,
        /// Reference n of the lattice approximation, where one is needed.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        reference_n: Option<u64>,
    },
    /// Spacing laws of log V_k / log n, optionally with a sampled KS check.
    Spacings {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        r: u32,
        /// Evaluate the marginal and order-statistic laws at x.
        #[arg(long, value_parser = unit_interval, required_unless_present = "n")]
        x: Option<f64>,
        /// Sample from H_{r,r}(n) and compare.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: Option<u64>,
        #[arg(long, short = 'm', default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Sum of f(GCD) or f(LCM) over the region.
    Hypersum {
        #[command(flatten)]
        region: RegionArgs,
        /// identity, log, indicator-of-one or power:BETA.
        #[arg(long, default_value = "identity", conflicts_with = "table")]
        f: String,
        /// CSV file of `m,value` rows defining f.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value = "gcd")]
        mode: String,
        /// Estimate from this many draws instead of enumerating.
        #[arg(long, short = 'm', value_parser = clap::value_parser!(u64).range(2..))]
        m: Option<u64>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Verify {
        /// Reduced sample sizes and regions.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        seed: SeedArg,
        /// Only these criteria, e.g. `1,7,10`.
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=15))]
        criteria: Option<Vec<u32>>,
    },
}
