use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use sdof::netmodel::{NetworkConfig, DEFAULT_MAGNITUDE_RANGE};
use sdof::CodebookSpec;

use crate::args::{parse_seeds, NetworkArgs};
use crate::error::CliError;

pub const DEFAULT_SNR_DB: [f64; 2] = [60.0, 80.0];

/// Network config file; every field is optional and flags win.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(rename = "M")]
    pub transmitters: Option<usize>,
    #[serde(rename = "N")]
    pub receivers: Option<usize>,
    pub m: Option<u32>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub snr_db: Option<Vec<f64>>,
    pub magnitude_range: Option<(f64, f64)>,
}

/// Binning-lab toy spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinlabFile {
    #[serde(flatten)]
    pub codebook: CodebookSpec,
    /// Row-stochastic matrix indexed `[x * own_alphabet + u][y]`.
    pub channel: Vec<Vec<f64>>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Fully resolved network run: one config per seed, plus the dB grid.
#[derive(Debug, Clone)]
pub struct NetworkRun {
    pub configs: Vec<NetworkConfig>,
    pub snr_db: Vec<f64>,
}

impl NetworkRun {
    pub fn resolve(args: &NetworkArgs) -> Result<Self, CliError> {
        let file: NetworkFile = match &args.config {
            Some(p) => read_json(p)?,
            None => NetworkFile::default(),
        };
        let missing = |flag: &str| CliError::Config(format!("--{flag} is required"));
        let transmitters = args.transmitters.or(file.transmitters).ok_or_else(|| missing("M"))?;
        let receivers = args.receivers.or(file.receivers).ok_or_else(|| missing("N"))?;
        let m = args.m.or(file.m).ok_or_else(|| missing("m"))?;
        let seeds = match (&args.seeds, args.seed, &file.seeds, file.seed) {
            (Some(s), _, _, _) => parse_seeds(s)?,
            (None, Some(s), _, _) => vec![s],
            (None, None, Some(list), _) => {
                let mut list = list.clone();
                list.sort_unstable();
                list.dedup();
                list
            }
            (None, None, None, Some(s)) => vec![s],
            _ => vec![1],
        };
        let snr_db = args.snr_db.clone().or(file.snr_db).unwrap_or_else(|| DEFAULT_SNR_DB.to_vec());
        let range = file.magnitude_range.unwrap_or(DEFAULT_MAGNITUDE_RANGE);
        let configs = seeds
            .iter()
            .map(|&seed| NetworkConfig::from_db(transmitters, receivers, m, seed, &snr_db, range))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { configs, snr_db })
    }
}
