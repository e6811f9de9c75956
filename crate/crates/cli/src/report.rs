//! Report rows, CSV headers, and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

pub const TRAIN_LOG_HEADER: &str = "episode,mean_reward,mean_cost,epsilon";
pub const TRAIN_SUMMARY_HEADER: &str = "seed,trained_cost,random_cost,best_fixed_cost,first_window_cost,last_window_cost,qos_violation_rate,invalid_action_rate";
pub const IMPACT_HEADER: &str = "seed,condition,targets,gamma,mean_cost,mean_latency,mean_energy,qos_violation_rate,invalid_action_rate,normalized_cost";
pub const METRICS_HEADER: &str = "model,task,class,precision,recall,f_measure";

/// One training/baseline row per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub seed: u64,
    pub trained_cost: f64,
    pub random_cost: f64,
    pub best_fixed_cost: f64,
    pub first_window_cost: f64,
    pub last_window_cost: f64,
    pub qos_violation_rate: f64,
    pub invalid_action_rate: f64,
}

/// One evaluation row per (seed, attack condition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactRow {
    pub seed: u64,
    pub condition: String,
    pub targets: Vec<usize>,
    pub gamma: f64,
    pub mean_cost: f64,
    pub mean_latency: f64,
    pub mean_energy: f64,
    pub qos_violation_rate: f64,
    pub invalid_action_rate: f64,
    pub normalized_cost: f64,
}

/// Seed-aggregated normalized cost per condition. The median carries the
/// typical-case trend; attack impact draws are heavy-tailed, so the mean
/// and standard deviation are reported alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactAggregate {
    pub condition: String,
    pub median_normalized_cost: f64,
    pub mean_normalized_cost: f64,
    pub std_normalized_cost: f64,
    pub mean_cost: f64,
}

/// One metrics row per (model, task, class); `class` is a station label or
/// `macro`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub model: String,
    pub task: String,
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Outcome of one acceptance-style threshold check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The single manifest written by `run_all`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub experiment_id: String,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub train: Vec<TrainRow>,
    pub impact: Vec<ImpactRow>,
    pub impact_aggregate: Vec<ImpactAggregate>,
    pub detection: Vec<MetricsRow>,
    pub checks: Vec<CheckResult>,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Creates `dir` (and parents) and returns a handle for artifact paths.
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn policy_path(&self, seed: u64) -> PathBuf {
        self.root.join(format!("policy_seed{seed}.json"))
    }

    pub fn train_log_path(&self, seed: u64) -> PathBuf {
        self.root.join(format!("train_log_seed{seed}.csv"))
    }

    pub fn train_summary_path(&self) -> PathBuf {
        self.root.join("train_summary.csv")
    }

    pub fn impact_path(&self) -> PathBuf {
        self.root.join("impact.csv")
    }

    pub fn stats_path(&self, seed: u64) -> PathBuf {
        self.root.join(format!("recon_stats_seed{seed}.json"))
    }

    pub fn dataset_path(&self, task: &str) -> PathBuf {
        self.root.join(format!("dataset_{task}.csv"))
    }

    pub fn model_path(&self, kind: &str, task: &str) -> PathBuf {
        self.root.join(format!("model_{kind}_{task}.json"))
    }

    pub fn metrics_path(&self) -> PathBuf {
        self.root.join("metrics.csv")
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    pub fn write_text(&self, path: &Path, text: &str) -> Result<()> {
        let mut file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        file.write_all(text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn train_summary_csv(rows: &[TrainRow]) -> String {
    let mut out = String::from(TRAIN_SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.trained_cost,
            r.random_cost,
            r.best_fixed_cost,
            r.first_window_cost,
            r.last_window_cost,
            r.qos_violation_rate,
            r.invalid_action_rate
        ));
    }
    out
}

pub fn impact_csv(rows: &[ImpactRow]) -> String {
    let mut out = String::from(IMPACT_HEADER);
    out.push('\n');
    for r in rows {
        let targets = r
            .targets
            .iter()
            .map(|t| t.to_string())
            .collect::<Vec<_>>()
            .join("|");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.seed,
            r.condition,
            targets,
            r.gamma,
            r.mean_cost,
            r.mean_latency,
            r.mean_energy,
            r.qos_violation_rate,
            r.invalid_action_rate,
            r.normalized_cost
        ));
    }
    out
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.model, r.task, r.class, r.precision, r.recall, r.f_measure
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_emitters_use_the_documented_headers() {
        assert!(train_summary_csv(&[]).starts_with(TRAIN_SUMMARY_HEADER));
        assert!(impact_csv(&[]).starts_with(IMPACT_HEADER));
        assert!(metrics_csv(&[]).starts_with(METRICS_HEADER));
    }

    #[test]
    fn impact_rows_render_targets_pipe_separated() {
        let row = ImpactRow {
            seed: 3,
            condition: "multi_2".into(),
            targets: vec![0, 1],
            gamma: 2.0,
            mean_cost: 0.5,
            mean_latency: 0.2,
            mean_energy: 0.1,
            qos_violation_rate: 0.0,
            invalid_action_rate: 0.0,
            normalized_cost: 2.5,
        };
        let csv = impact_csv(&[row]);
        assert!(csv.contains("3,multi_2,0|1,2,0.5,0.2,0.1,0,0,2.5"));
    }
}
