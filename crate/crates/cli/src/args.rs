use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "sdof", version, about = "Secure DoF laboratory for X networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print symbol-extension dimensions.
    Dims(NetworkArgs),
    /// Build precoders and emit one alignment certificate per seed.
    Align(NetworkArgs),
    /// Sweep secure rates over the SNR grid.
    Rates(RatesArgs),
    /// Exact closed-form DoF over a parameter grid.
    DofTable(DofTableArgs),
    /// Exact equivocation runs of the binning lab.
    Binlab(BinlabArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    /// Number of transmitters.
    #[arg(long = "M")]
    pub transmitters: Option<usize>,
    /// Number of receivers.
    #[arg(long = "N")]
    pub receivers: Option<usize>,
    /// Alignment order.
    #[arg(long = "m")]
    pub m: Option<u32>,
    /// Seeds: a count `n` (seeds 1..=n), a range `a..b` (inclusive) or a comma list.
    #[arg(long)]
    pub seeds: Option<String>,
    /// Single seed; ignored when --seeds is given.
    #[arg(long)]
    pub seed: Option<u64>,
    /// SNR grid in dB, comma separated.
    #[arg(long = "snr-db", value_delimiter = ',')]
    pub snr_db: Option<Vec<f64>>,
    /// JSON network config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Secrecy constraint, 1 to 4.
    #[arg(long, default_value_t = 1)]
    pub constraint: u8,
    /// Compromised transmitters, 1-based comma list.
    #[arg(long, value_delimiter = ',')]
    pub compromised: Vec<usize>,
    /// Excluded transmitter (1-based) or `worst`.
    #[arg(long = "excluded-tx")]
    pub excluded_tx: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct DofTableArgs {
    /// One of 1, 2, 3-c3, 3-c4, 4, 5, ic-baseline; all when omitted.
    #[arg(long)]
    pub theorem: Option<String>,
    #[arg(long = "M")]
    pub transmitters: Option<usize>,
    #[arg(long = "N")]
    pub receivers: Option<usize>,
    /// Users of the interference channel.
    #[arg(long = "K")]
    pub users: Option<usize>,
    /// Size of the compromised set.
    #[arg(long = "S")]
    pub compromised: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BinlabArgs {
    /// JSON toy spec: codebook counts, alphabets, channel matrix, seed.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the codebook seed; same syntax as for `align`.
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `n`, `a..b` or `a,b,c`; result is sorted and deduplicated.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Config(format!("cannot parse seeds {text:?}"));
    let text = text.trim();
    let mut seeds: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        (a..=b).collect()
    } else if text.contains(',') {
        text.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    } else {
        let n: u64 = text.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        (1..=n).collect()
    };
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}
