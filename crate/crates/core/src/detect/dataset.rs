//! Labeled detection datasets: generation from policy runs under attack
//! conditions, stratified splitting, and the CSV wire format.

use std::io::{BufRead, BufReader, Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DetectError;
use crate::agent::Policy;
use crate::attack::{AttackConfig, FeatureStats, Poisoner};
use crate::env::{GridEnv, StateTransform};
use crate::scalar::Scalar;
use crate::util::derive_seed;

/// One detection training row: the full observed state vector and its
/// compromise label (0 benign, `k+1` station `k` compromised).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample<T> {
    pub features: Vec<T>,
    pub label: usize,
}

/// Train/test split indices into a dataset's sample list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// A labeled dataset with a fixed feature dimension and class count.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    samples: Vec<LabeledSample<T>>,
    dim: usize,
    n_classes: usize,
    split: Option<Split>,
}

impl<T: Scalar> Dataset<T> {
    pub fn from_samples(
        samples: Vec<LabeledSample<T>>,
        n_classes: usize,
    ) -> Result<Self, DetectError> {
        if samples.is_empty() {
            return Err(DetectError::EmptyTrainingSet);
        }
        let dim = samples[0].features.len();
        for s in &samples {
            if s.features.len() != dim {
                return Err(DetectError::DimensionMismatch {
                    expected: dim,
                    got: s.features.len(),
                });
            }
            if s.label >= n_classes {
                return Err(DetectError::LabelOutOfRange {
                    label: s.label,
                    classes: n_classes,
                });
            }
        }
        Ok(Self {
            samples,
            dim,
            n_classes,
            split: None,
        })
    }

    pub fn samples(&self) -> &[LabeledSample<T>] {
        &self.samples
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for s in &self.samples {
            counts[s.label] += 1;
        }
        counts
    }

    pub fn split(&self) -> Option<&Split> {
        self.split.as_ref()
    }

    /// Splits per class so each side preserves the class ratios to within
    /// one sample.
    pub fn stratified_split(&mut self, train_ratio: f64, seed: u64) {
        assert!((0.0..=1.0).contains(&train_ratio));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut train = Vec::new();
        let mut test = Vec::new();
        for class in 0..self.n_classes {
            let mut indices: Vec<usize> = self
                .samples
                .iter()
                .enumerate()
                .filter_map(|(i, s)| (s.label == class).then_some(i))
                .collect();
            indices.shuffle(&mut rng);
            let n_train = (train_ratio * indices.len() as f64).round() as usize;
            for (pos, idx) in indices.into_iter().enumerate() {
                if pos < n_train {
                    train.push(idx);
                } else {
                    test.push(idx);
                }
            }
        }
        train.sort_unstable();
        test.sort_unstable();
        self.split = Some(Split { train, test });
    }

    pub fn train_samples(&self) -> Result<Vec<&LabeledSample<T>>, DetectError> {
        let split = self.split.as_ref().ok_or(DetectError::MissingSplit)?;
        Ok(split.train.iter().map(|&i| &self.samples[i]).collect())
    }

    pub fn test_samples(&self) -> Result<Vec<&LabeledSample<T>>, DetectError> {
        let split = self.split.as_ref().ok_or(DetectError::MissingSplit)?;
        Ok(split.test.iter().map(|&i| &self.samples[i]).collect())
    }

    /// Collapses labels to attack-vs-benign (0 stays 0, everything else
    /// becomes 1), keeping any existing split.
    pub fn to_binary(&self) -> Self {
        Self {
            samples: self
                .samples
                .iter()
                .map(|s| LabeledSample {
                    features: s.features.clone(),
                    label: usize::from(s.label > 0),
                })
                .collect(),
            dim: self.dim,
            n_classes: 2,
            split: self.split.clone(),
        }
    }

    /// CSV with header `f0..f{d-1},label`, one row per sample.
    pub fn write_csv<W: Write>(&self, writer: &mut W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.dim).map(|i| format!("f{i}")).collect();
        writeln!(writer, "{},label", header.join(","))?;
        for s in &self.samples {
            let fields: Vec<String> = s.features.iter().map(|v| format!("{v}")).collect();
            writeln!(writer, "{},{}", fields.join(","), s.label)?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, n_classes: usize) -> Result<Self, DetectError> {
        let reader = BufReader::new(reader);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| DetectError::Csv("empty file".into()))??;
        let dim = header.split(',').count() - 1;
        if !header.ends_with(",label") {
            return Err(DetectError::Csv("header must end with ',label'".into()));
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != dim + 1 {
                return Err(DetectError::Csv(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    dim + 1
                )));
            }
            let features = fields[..dim]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map(T::of)
                        .map_err(|e| DetectError::Csv(format!("row {}: {e}", lineno + 2)))
                })
                .collect::<Result<Vec<T>, _>>()?;
            let label = fields[dim]
                .parse::<usize>()
                .map_err(|e| DetectError::Csv(format!("row {}: {e}", lineno + 2)))?;
            samples.push(LabeledSample { features, label });
        }
        Self::from_samples(samples, n_classes)
    }
}

/// Runs the frozen policy under one condition and records what it observes.
///
/// Every recorded vector is the state *as seen* (poisoned when a poisoner is
/// given); the policy also acts on that seen state, so the induced state
/// distribution matches a real attacked run.
pub fn collect_states<T: Scalar>(
    env: &mut GridEnv<T>,
    policy: &Policy<T>,
    mut poisoner: Option<&mut Poisoner<T>>,
    n: usize,
) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let observed = env.observe();
        let seen = match poisoner.as_deref_mut() {
            Some(p) => p.transform(&observed),
            None => observed,
        };
        out.push(seen.to_vec());
        let action = policy.greedy_action(out.last().expect("just pushed"));
        env.step(action);
    }
    out
}

/// Generates a fine-grained labeled dataset over an attack grid.
///
/// The grid must contain a benign condition (label 0); every attacked
/// condition must target exactly one station `k` (label `k+1`), since
/// multiclass labels are undefined for simultaneous multi-station attacks.
/// Per-condition sample counts come with the grid, so callers control class
/// balance.
pub fn gen_dataset<T: Scalar>(
    env: &mut GridEnv<T>,
    policy: &Policy<T>,
    stats: &[FeatureStats<T>],
    grid: &[(AttackConfig, usize)],
    seed: u64,
) -> Result<Dataset<T>, DetectError> {
    if !grid.iter().any(|(c, _)| c.is_benign()) {
        return Err(DetectError::MissingBenignCondition);
    }
    let n_classes = env.station_count() + 1;
    let mut samples = Vec::new();
    for (index, (config, count)) in grid.iter().enumerate() {
        let label = match config.targets.as_slice() {
            [] => 0,
            [k] => k + 1,
            _ => return Err(DetectError::MultiTargetLabel),
        };
        if label >= n_classes {
            return Err(DetectError::LabelOutOfRange {
                label,
                classes: n_classes,
            });
        }
        env.reset(derive_seed(seed, &format!("dataset-env-{index}")));
        let mut poisoner = Poisoner::new(
            config.clone(),
            stats.to_vec(),
            derive_seed(seed, &format!("dataset-poison-{index}")),
        )
        .map_err(DetectError::Attack)?;
        for features in collect_states(env, policy, Some(&mut poisoner), *count) {
            samples.push(LabeledSample { features, label });
        }
    }
    Dataset::from_samples(samples, n_classes)
}
