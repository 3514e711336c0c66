//! Run configuration: one TOML file describes a whole reproducible run;
//! command-line flags override individual values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use plantsis::month::Month;
use plantsis::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub paths: Paths,
    /// Root seed for every random stream. Mandatory for commands that
    /// simulate; ignored by the purely structural ones.
    pub master_seed: Option<u64>,
    /// Threads for the worker pool, default 1. Never affects results.
    pub worker_count: Option<usize>,
    pub prior: Option<PriorConfig>,
    pub simulate: Option<SimulateConfig>,
    pub rejection: Option<RejectionConfig>,
    pub mcmc: Option<McmcSection>,
    pub pilot: Option<PilotConfig>,
    pub filter: Option<FilterConfig>,
    pub diagnose: Option<DiagnoseConfig>,
    pub forecast: Option<ForecastConfig>,
    pub validate: Option<ValidateConfig>,
    pub bin: Option<BinConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Edge list CSV: `u,v` per line.
    pub edges: PathBuf,
    /// Node metadata CSV: `id,planted`.
    pub nodes: PathBuf,
    /// Footprint polygon CSV, needed only for point binning.
    pub footprints: Option<PathBuf>,
    /// Observed snapshot matrix used for inference and as forecast anchor.
    pub snapshots: Option<PathBuf>,
    /// Raw point observations for the `bin` command.
    pub points: Option<PathBuf>,
    /// Directory all outputs are written into.
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorConfig {
    pub lower: [f64; 6],
    pub upper: [f64; 6],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    /// Parameter values in the documented column order.
    pub params: [f64; 6],
    pub start_month: Month,
    pub horizon: usize,
    /// Node indices infected at month 0.
    pub initial: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RejectionConfig {
    pub attempts: u64,
    pub epsilon: f64,
}

/// Mirrors the engine's MCMC settings; absent fields take the documented
/// defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcSection {
    pub iterations: Option<u64>,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
    pub epsilon: Option<f64>,
    pub proposal_sd: Option<[f64; 6]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PilotConfig {
    pub attempts: u64,
    /// Quantiles of the prior-predictive discrepancy to report.
    pub quantiles: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    /// Draws file to re-filter; defaults to `<out_dir>/draws.csv`.
    pub draws: Option<PathBuf>,
    pub epsilon: f64,
    pub generation_epsilon: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseConfig {
    pub draws: Option<PathBuf>,
    /// Histogram resolution of the density grids, default 25.
    pub bins: Option<usize>,
    /// Maximum autocorrelation lag in the lag table, default 50.
    pub max_lag: Option<usize>,
    /// Descending tolerances for the sensitivity table.
    pub epsilons: Option<Vec<f64>>,
    /// Tolerance the draws were generated at; required with `epsilons`.
    pub generation_epsilon: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastConfig {
    pub draws: Option<PathBuf>,
    /// calendar | all-summer | all-winter
    pub season_mode: Option<String>,
    pub cleared: Option<Vec<u32>>,
    pub horizon: Option<usize>,
    /// Defaults to the month of the last observed snapshot.
    pub start_month: Option<Month>,
    pub replicates: Option<usize>,
    /// Also run a no-clearing calendar baseline and report the deltas.
    pub compare_with_baseline: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    /// Full observed series including the hold-out tail.
    pub snapshots: PathBuf,
    pub draws: Option<PathBuf>,
    pub holdout_months: Option<usize>,
    pub replicates: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinConfig {
    /// Number of snapshots the point file indexes into.
    pub snapshots: usize,
    pub start_month: Month,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            Error::InvalidInput(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn master_seed(&self) -> Result<u64> {
        self.master_seed.ok_or_else(|| {
            Error::InvalidInput("this command needs master_seed in the config or --seed".into())
        })
    }

    pub fn worker_count(&self) -> usize {
        self.worker_count.unwrap_or(1).max(1)
    }

    /// Short hex digest identifying the configuration, recorded in every
    /// output header. The worker count is excluded so outputs stay
    /// byte-identical across pool sizes.
    pub fn digest(&self) -> String {
        let mut canonical = self.clone();
        canonical.worker_count = None;
        let text = toml::to_string(&canonical).expect("config serializes");
        let hash = Sha256::digest(text.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// The metadata line opening every output file.
    pub fn header(&self) -> String {
        let seed = match self.master_seed {
            Some(s) => s.to_string(),
            None => "none".into(),
        };
        format!("# plantsis {} seed={seed} config={}", env!("CARGO_PKG_VERSION"), self.digest())
    }
}
