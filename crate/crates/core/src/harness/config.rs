//! Experiment configuration, loaded from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::PipelineConfig;
use crate::signal::SamplingConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Scenario {
    BetaSweep,
    SnrSweep,
    BandlimitedSweep,
    SingleTrial,
    PropCheck,
    Ingest,
}

/// Recovery method run per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Method {
    /// One DP pass.
    Dp,
    /// One DP pass followed by OMP.
    DpOmp,
    /// `iter_max` rounds of DP + OMP.
    DpOmpIter,
    /// OMP over the full out-of-band tail.
    OmpOnly,
    /// Higher-order-difference unfolding.
    Usalg,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dp => "dp",
            Method::DpOmp => "dp_omp",
            Method::DpOmpIter => "dp_omp_iter",
            Method::OmpOnly => "omp_only",
            Method::Usalg => "usalg",
        }
    }

    /// Pipeline settings for this method; `base` supplies p, β, V, iteration count and budgets.
    pub fn pipeline(self, base: &PipelineConfig) -> PipelineConfig {
        let mut cfg = base.clone();
        match self {
            Method::Dp => {
                cfg.iter_max = 1;
                cfg.omp_max_sparsity = Some(0);
            }
            Method::DpOmp => {
                cfg.iter_max = 1;
                if cfg.omp_max_sparsity == Some(0) {
                    cfg.omp_max_sparsity = None;
                }
            }
            Method::DpOmpIter => {
                cfg.iter_max = base.iter_max.max(2);
                if cfg.omp_max_sparsity == Some(0) {
                    cfg.omp_max_sparsity = None;
                }
            }
            Method::OmpOnly | Method::Usalg => {
                let omp = PipelineConfig::omp_only();
                cfg.iter_max = omp.iter_max;
                cfg.dp_enabled = omp.dp_enabled;
                cfg.subset_rule = omp.subset_rule;
                cfg.omp_max_sparsity = None;
            }
        }
        cfg
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub sampling: SamplingConfig,
    pub pipeline: PipelineConfig,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub snr_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub success_threshold_db: f64,
    /// Worker threads; 0 uses all cores.
    pub parallelism: usize,
    /// Record wall-clock runtimes. Disable for byte-identical reruns.
    pub timing: bool,
    /// Largest difference order considered by the USAlg baseline.
    pub usalg_max_order: usize,
    /// Peak modulus of generated bandlimited signals.
    pub bandlimited_peak: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: Scenario::SnrSweep,
            sampling: SamplingConfig::default(),
            pipeline: PipelineConfig::default(),
            methods: vec![Method::DpOmpIter],
            trials: 50,
            snr_grid: vec![14.0, 18.0, 22.0, 26.0, 30.0],
            beta_grid: vec![0.01, 0.04, 0.07, 0.1, 0.15, 0.2],
            success_threshold_db: -15.0,
            parallelism: 0,
            timing: true,
            usalg_max_order: 4,
            bandlimited_peak: 2.0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        match self.scenario {
            Scenario::BetaSweep if self.beta_grid.is_empty() => {
                return Err(Error::Config("beta_grid is empty".into()));
            }
            Scenario::SnrSweep | Scenario::BandlimitedSweep if self.snr_grid.is_empty() => {
                return Err(Error::Config("snr_grid is empty".into()));
            }
            _ => {}
        }
        if self.usalg_max_order < 1 {
            return Err(Error::Config("usalg_max_order must be >= 1".into()));
        }
        self.sampling.validate()?;
        self.pipeline.validate()
    }
}
