//! Frozen policies: the trained Q-network, its input normalization, and
//! greedy/epsilon-greedy action selection.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AgentError;
use crate::nn::DenseNet;
use crate::scalar::Scalar;

/// Fixed per-feature affine scaling applied before the network input.
///
/// The simulator emits physical units spanning ten orders of magnitude;
/// shallow nets need features of order one. The constants live inside the
/// policy file so any observation - poisoned or not - is scaled identically
/// at decision time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer<T> {
    scale: Vec<T>,
}

impl<T: Scalar> Normalizer<T> {
    pub fn new(scale: Vec<T>) -> Self {
        Self { scale }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            scale: vec![T::one(); dim],
        }
    }

    /// Scales for the grid observation layout: bits by 1e-6, cycles by
    /// 1e-9, rates by 1e-8, latencies and the budget by 1.
    pub fn for_grid_observation(stations: usize) -> Self {
        let mut scale = Vec::with_capacity(5 + 2 * stations);
        scale.push(T::of(1e-6)); // demand bits
        scale.push(T::of(1e-6)); // monitor bits
        scale.push(T::of(1e-9)); // demand cycles
        scale.push(T::of(1e-9)); // monitor cycles
        scale.extend(std::iter::repeat(T::of(1e-8)).take(stations)); // rates
        scale.extend(std::iter::repeat(T::one()).take(stations)); // latencies
        scale.push(T::one()); // latency budget
        Self { scale }
    }

    pub fn dim(&self) -> usize {
        self.scale.len()
    }

    pub fn apply(&self, raw: &[T]) -> Vec<T> {
        assert_eq!(raw.len(), self.scale.len(), "normalizer dimension mismatch");
        raw.iter().zip(&self.scale).map(|(&x, &s)| x * s).collect()
    }
}

/// Provenance carried inside a policy file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyMeta {
    pub seed: u64,
    pub config_hash: String,
    pub actions: usize,
}

/// A frozen offloading policy: trained centrally, then loaded read-only by
/// distributed deciders. Evaluation never mutates the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy<T> {
    net: DenseNet<T>,
    normalizer: Normalizer<T>,
    meta: PolicyMeta,
}

impl<T: Scalar> Policy<T> {
    pub fn new(net: DenseNet<T>, normalizer: Normalizer<T>, meta: PolicyMeta) -> Self {
        assert_eq!(net.output_dim(), meta.actions, "output dim must equal K");
        assert_eq!(
            net.input_dim(),
            normalizer.dim(),
            "normalizer must match net input"
        );
        Self {
            net,
            normalizer,
            meta,
        }
    }

    pub fn net(&self) -> &DenseNet<T> {
        &self.net
    }

    pub fn normalizer(&self) -> &Normalizer<T> {
        &self.normalizer
    }

    pub fn meta(&self) -> &PolicyMeta {
        &self.meta
    }

    pub fn actions(&self) -> usize {
        self.meta.actions
    }

    /// Q-values for a raw (physical-unit) observation.
    pub fn q_values(&self, raw_state: &[T]) -> Vec<T> {
        self.net.forward_output(&self.normalizer.apply(raw_state))
    }

    /// Greedy action with lowest-index tie-breaking.
    pub fn greedy_action(&self, raw_state: &[T]) -> usize {
        argmax(&self.q_values(raw_state))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, AgentError> {
        let policy: Self =
            serde_json::from_str(json).map_err(|e| AgentError::MalformedPolicy(e.to_string()))?;
        if policy.net.output_dim() != policy.meta.actions
            || policy.net.input_dim() != policy.normalizer.dim()
        {
            return Err(AgentError::MalformedPolicy(
                "inconsistent dimensions in policy file".into(),
            ));
        }
        Ok(policy)
    }
}

/// Index of the maximum, ties broken by the lowest index.
pub(crate) fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy selection over the Q-network's outputs for a normalized
/// state: uniform with probability `epsilon`, greedy otherwise.
pub fn select_action<T: Scalar>(
    net: &DenseNet<T>,
    normalized_state: &[T],
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> usize {
    debug_assert!((0.0..=1.0).contains(&epsilon));
    let actions = net.output_dim();
    if rng.random::<f64>() < epsilon {
        rng.random_range(0..actions)
    } else {
        argmax(&net.forward_output(normalized_state))
    }
}
