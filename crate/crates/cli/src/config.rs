//! Run configuration: defaults, optional JSON config file, command-line flags.
//! Flags win over the file, the file wins over defaults.

use std::path::Path;

use anyhow::{Context, Result};
use qmarko::qaoa::{MixerKind, ScheduleConfig};
use qmarko::Optimizer;
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "QMARKO_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
    pub mixer: MixerKind,
    /// Fixed penalty weight of the penalty-QAOA baseline.
    pub penalty: f64,
    pub beta_init: f64,
    pub doubling_interval: usize,
    pub shots: usize,
    pub feasibility_target: f64,
    pub max_iter: usize,
    pub lambda: Option<f64>,
    pub q: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let schedule = ScheduleConfig::default();
        Self {
            p: 2,
            seed: 0,
            optimizer: schedule.optimizer,
            mixer: MixerKind::Conditional,
            penalty: 1000.0,
            beta_init: schedule.beta_penalty_init,
            doubling_interval: schedule.doubling_interval,
            shots: schedule.feasibility_shots,
            feasibility_target: schedule.feasibility_target,
            max_iter: schedule.max_iterations,
            lambda: None,
            q: None,
        }
    }
}

impl RunConfig {
    pub fn schedule(&self) -> ScheduleConfig {
        ScheduleConfig {
            beta_penalty_init: self.beta_init,
            doubling_interval: self.doubling_interval,
            feasibility_shots: self.shots,
            feasibility_target: self.feasibility_target,
            max_iterations: self.max_iter,
            optimizer: self.optimizer,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigFlags {
    /// JSON file with any subset of the run configuration keys.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// QAOA depth.
    #[arg(long)]
    pub p: Option<usize>,
    /// Run seed (falls back to the config file, then $QMARKO_SEED, then 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerArg>,
    #[arg(long, value_enum)]
    pub mixer: Option<MixerArg>,
    /// Fixed penalty weight for penalty-qaoa.
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Initial penalty weight of the doubling schedule.
    #[arg(long)]
    pub beta_init: Option<f64>,
    /// Optimizer iterations between feasibility checks.
    #[arg(long)]
    pub doubling_interval: Option<usize>,
    /// Samples per feasibility check.
    #[arg(long)]
    pub shots: Option<usize>,
    /// Required sampled feasible fraction, in (0, 1].
    #[arg(long)]
    pub feasibility_target: Option<f64>,
    /// Optimizer iteration cap.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Override the instance's return trade-off weight.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Override the instance's risk-aversion factor.
    #[arg(long)]
    pub q: Option<f64>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OptimizerArg {
    Cobyla,
    NelderMead,
}

impl From<OptimizerArg> for Optimizer {
    fn from(a: OptimizerArg) -> Self {
        match a {
            OptimizerArg::Cobyla => Optimizer::Cobyla,
            OptimizerArg::NelderMead => Optimizer::NelderMead,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MixerArg {
    Standard,
    Conditional,
}

impl From<MixerArg> for MixerKind {
    fn from(a: MixerArg) -> Self {
        match a {
            MixerArg::Standard => MixerKind::Standard,
            MixerArg::Conditional => MixerKind::Conditional,
        }
    }
}

impl ConfigFlags {
    /// Resolves the configuration. `env_seed` is the raw `$QMARKO_SEED`.
    pub fn resolve(&self, env_seed: Option<String>) -> Result<RunConfig> {
        let (mut cfg, file_has_seed) = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                let raw: serde_json::Value = serde_json::from_str(&text)
                    .with_context(|| format!("parsing config {}", path.display()))?;
                let has_seed = raw.get("seed").is_some();
                let cfg: RunConfig = serde_json::from_value(raw)
                    .with_context(|| format!("parsing config {}", path.display()))?;
                (cfg, has_seed)
            }
            None => (RunConfig::default(), false),
        };
        if !file_has_seed {
            if let Some(raw) = env_seed {
                cfg.seed = raw
                    .trim()
                    .parse()
                    .with_context(|| format!("{SEED_ENV}={raw:?} is not an unsigned integer"))?;
            }
        }
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    cfg.$field = v.into();
                }
            };
        }
        take!(p);
        take!(seed);
        take!(optimizer);
        take!(mixer);
        take!(penalty);
        take!(beta_init);
        take!(doubling_interval);
        take!(shots);
        take!(feasibility_target);
        take!(max_iter);
        if self.lambda.is_some() {
            cfg.lambda = self.lambda;
        }
        if self.q.is_some() {
            cfg.q = self.q;
        }
        if cfg.p == 0 {
            anyhow::bail!("--p must be at least 1");
        }
        if cfg.penalty.is_nan() || cfg.penalty <= 0.0 {
            anyhow::bail!("--penalty must be positive");
        }
        cfg.schedule().validate().map_err(|e| anyhow::anyhow!("invalid schedule flags: {e}"))?;
        Ok(cfg)
    }
}
