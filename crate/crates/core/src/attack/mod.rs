//! The false-state-injection adversary: reconnaissance of the per-station
//! data-rate distribution, construction of the mean-shifted adversarial
//! normal, and observation poisoning for compromised stations.
//!
//! The adversary shifts the reported rate distribution's mean by
//! `sqrt(2 * gamma) * sigma` while keeping the standard deviation, where
//! `gamma` is the injection-intensity parameter it controls.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::Policy;
use crate::env::{GridEnv, StateTransform, StateVector};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum AttackError {
    #[error("need at least 2 samples to estimate a distribution, got {0}")]
    TooFewSamples(usize),
    #[error("no reconnaissance statistics for targeted station {0}")]
    MissingStats(usize),
    #[error("at most 3 stations may be targeted, got {0}")]
    TooManyTargets(usize),
    #[error("injection intensity must be non-negative, got {0}")]
    NegativeGamma(f64),
    #[error("targeted station {station} does not exist (only {stations} stations)")]
    UnknownStation { station: usize, stations: usize },
}

/// First two moments of a station's benign data-rate distribution, as the
/// adversary estimates them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats<T> {
    pub mean: T,
    pub std_dev: T,
    pub count: usize,
}

/// Sample mean and unbiased standard deviation.
pub fn estimate_stats<T: Scalar>(samples: &[T]) -> Result<FeatureStats<T>, AttackError> {
    if samples.len() < 2 {
        return Err(AttackError::TooFewSamples(samples.len()));
    }
    let n = T::of(samples.len() as f64);
    let mean = samples.iter().copied().sum::<T>() / n;
    let ss = samples
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<T>();
    let std_dev = (ss / (n - T::one())).sqrt();
    Ok(FeatureStats {
        mean,
        std_dev,
        count: samples.len(),
    })
}

/// How poisoned rate values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoisonMode {
    /// Add the mean shift to the true value (preserves within-run
    /// correlation; the stealthier reading).
    Shift,
    /// Replace the value with a fresh draw from the shifted normal.
    Resample,
}

/// An attack condition: which stations are compromised and how hard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackConfig {
    /// Compromised station indices (at most three).
    pub targets: Vec<usize>,
    /// Injection intensity `gamma >= 0`.
    pub gamma: f64,
    pub mode: PoisonMode,
}

impl AttackConfig {
    pub fn benign() -> Self {
        Self {
            targets: Vec::new(),
            gamma: 0.0,
            mode: PoisonMode::Shift,
        }
    }

    pub fn new(targets: Vec<usize>, gamma: f64, mode: PoisonMode) -> Result<Self, AttackError> {
        let config = Self {
            targets,
            gamma,
            mode,
        };
        config.validate()?;
        Ok(config)
    }

    /// Deduplicates and sorts targets, and checks the experimental bounds.
    pub fn validate(&self) -> Result<(), AttackError> {
        let mut unique = self.targets.clone();
        unique.sort_unstable();
        unique.dedup();
        if unique.len() != self.targets.len() {
            return Err(AttackError::TooManyTargets(self.targets.len()));
        }
        if self.targets.len() > 3 {
            return Err(AttackError::TooManyTargets(self.targets.len()));
        }
        if self.gamma < 0.0 {
            return Err(AttackError::NegativeGamma(self.gamma));
        }
        Ok(())
    }

    pub fn is_benign(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Mean of the adversarial distribution: `theta + sqrt(2 gamma) * sigma`.
pub fn attacked_mean<T: Scalar>(stats: &FeatureStats<T>, gamma: f64) -> T {
    debug_assert!(gamma >= 0.0);
    stats.mean + T::of((2.0 * gamma).sqrt()) * stats.std_dev
}

/// One draw from the adversarial normal (same sigma, shifted mean).
pub fn sample_attacked<T: Scalar>(
    rng: &mut ChaCha8Rng,
    stats: &FeatureStats<T>,
    gamma: f64,
) -> T {
    let mean = attacked_mean(stats, gamma);
    let sigma = stats.std_dev.to_real();
    if sigma == 0.0 {
        return mean;
    }
    let normal = Normal::new(mean.to_real(), sigma).expect("finite moments");
    T::of(normal.sample(rng))
}

/// Replaces the reported data rates of targeted stations; every other entry
/// is untouched and the input is not mutated.
pub fn poison_state<T: Scalar>(
    state: &StateVector<T>,
    config: &AttackConfig,
    stats: &[FeatureStats<T>],
    rng: &mut ChaCha8Rng,
) -> Result<StateVector<T>, AttackError> {
    config.validate()?;
    let mut out = state.clone();
    for &k in &config.targets {
        if k >= state.stations() {
            return Err(AttackError::UnknownStation {
                station: k,
                stations: state.stations(),
            });
        }
        let s = stats.get(k).ok_or(AttackError::MissingStats(k))?;
        let value = match config.mode {
            PoisonMode::Shift => {
                state.rate(k) + T::of((2.0 * config.gamma).sqrt()) * s.std_dev
            }
            PoisonMode::Resample => sample_attacked(rng, s, config.gamma),
        };
        out.set_rate(k, value);
    }
    Ok(out)
}

/// A configured injector usable as an evaluation hook.
pub struct Poisoner<T> {
    config: AttackConfig,
    stats: Vec<FeatureStats<T>>,
    rng: ChaCha8Rng,
}

impl<T: Scalar> Poisoner<T> {
    pub fn new(
        config: AttackConfig,
        stats: Vec<FeatureStats<T>>,
        seed: u64,
    ) -> Result<Self, AttackError> {
        config.validate()?;
        for &k in &config.targets {
            if k >= stats.len() {
                return Err(AttackError::MissingStats(k));
            }
        }
        use rand::SeedableRng;
        Ok(Self {
            config,
            stats,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn config(&self) -> &AttackConfig {
        &self.config
    }
}

impl<T: Scalar> StateTransform<T> for Poisoner<T> {
    fn transform(&mut self, state: &StateVector<T>) -> StateVector<T> {
        poison_state(state, &self.config, &self.stats, &mut self.rng)
            .expect("poisoner validated at construction")
    }
}

/// What the eavesdropping adversary profiles per station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReconMode {
    /// The rates of traffic the station actually serves: a narrow,
    /// unimodal per-station distribution.
    Serving,
    /// Every advertised (covered) reading of the station's rate: the broad
    /// marginal across all meter geometries.
    Observed,
}

/// Collects `n_obs` benign observations under the frozen policy and
/// estimates each station's rate distribution. In serving mode, stations
/// that serve too little traffic to profile fall back to their advertised
/// readings.
pub fn reconnaissance<T: Scalar>(
    policy: &Policy<T>,
    env: &mut GridEnv<T>,
    n_obs: usize,
    mode: ReconMode,
) -> Result<Vec<FeatureStats<T>>, AttackError> {
    let stations = env.station_count();
    let mut served: Vec<Vec<T>> = vec![Vec::new(); stations];
    let mut advertised: Vec<Vec<T>> = vec![Vec::new(); stations];
    for _ in 0..n_obs {
        let obs = env.observe();
        for (k, samples) in advertised.iter_mut().enumerate() {
            let rate = obs.rate(k);
            if rate > T::zero() {
                samples.push(rate);
            }
        }
        let action = policy.greedy_action(obs.as_slice());
        if obs.rate(action) > T::zero() {
            served[action].push(obs.rate(action));
        }
        env.step(action);
    }
    match mode {
        ReconMode::Observed => advertised.iter().map(|a| estimate_stats(a)).collect(),
        ReconMode::Serving => served
            .iter()
            .zip(&advertised)
            .map(|(s, a)| {
                if s.len() >= 2 {
                    estimate_stats(s)
                } else {
                    estimate_stats(a)
                }
            })
            .collect(),
    }
}
