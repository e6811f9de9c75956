//! Experiment configuration: one JSON document with `scenario`, `agent`,
//! `attack`, `detection`, and `seeds` sections. Unknown keys are rejected;
//! missing sections take the reference defaults.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use smartedge_core::agent::AgentConfig;
use smartedge_core::attack::{PoisonMode, ReconMode};
use smartedge_core::detect::DetectParams;
use smartedge_core::env::ScenarioParams;
use smartedge_core::util::stable_hash_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scenario: ScenarioParams,
    pub agent: AgentConfig,
    pub attack: AttackSettings,
    pub detection: DetectionSettings,
    pub seeds: Vec<u64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioParams::default(),
            agent: AgentConfig::default(),
            attack: AttackSettings::default(),
            detection: DetectionSettings::default(),
            seeds: vec![1, 2, 3, 4, 5],
        }
    }
}

/// Attack-impact study settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AttackSettings {
    /// Injection intensity used by the impact study.
    pub gamma: f64,
    pub mode: PoisonMode,
    /// What the adversary profiles during reconnaissance.
    pub recon_mode: ReconMode,
    /// Benign observations collected to estimate per-station rate moments.
    pub recon_observations: usize,
    /// Tasks per evaluation run (baselines and attack conditions).
    pub eval_tasks: usize,
}

impl Default for AttackSettings {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            mode: PoisonMode::Shift,
            recon_mode: ReconMode::Serving,
            recon_observations: 2000,
            eval_tasks: 1000,
        }
    }
}

/// Detection benchmark settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionSettings {
    pub samples_per_class: usize,
    /// Injection intensities mixed into each attacked class.
    pub gammas: Vec<f64>,
    pub train_ratio: f64,
    pub mode: PoisonMode,
    pub params: DetectParams,
}

impl Default for DetectionSettings {
    fn default() -> Self {
        Self {
            samples_per_class: 1000,
            gammas: vec![0.5, 1.0, 2.0, 4.0],
            train_ratio: 0.8,
            mode: PoisonMode::Shift,
            params: DetectParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("config needs at least one seed");
        }
        self.agent
            .validate()
            .map_err(|e| anyhow::anyhow!("agent section: {e}"))?;
        if self.attack.gamma < 0.0 {
            bail!("attack.gamma must be non-negative");
        }
        if self.attack.recon_observations < 2 {
            bail!("attack.recon_observations must be at least 2");
        }
        if self.attack.eval_tasks == 0 {
            bail!("attack.eval_tasks must be positive");
        }
        if self.detection.samples_per_class == 0 {
            bail!("detection.samples_per_class must be positive");
        }
        if self.detection.gammas.is_empty()
            || self.detection.gammas.iter().any(|&g| g < 0.0)
        {
            bail!("detection.gammas must be non-empty and non-negative");
        }
        if !(0.0 < self.detection.train_ratio && self.detection.train_ratio < 1.0) {
            bail!("detection.train_ratio must lie strictly between 0 and 1");
        }
        Ok(())
    }

    /// Stable hash over the parsed (whitespace-insensitive) configuration.
    pub fn hash(&self) -> String {
        stable_hash_json(self)
    }
}

/// Loads and validates a config file, with line/column diagnostics on
/// malformed input.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    config
        .validate()
        .with_context(|| format!("validating config {}", path.display()))?;
    Ok(config)
}
