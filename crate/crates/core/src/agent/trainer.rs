//! Centralized DQN training over any discrete-action environment.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::policy::{select_action, Normalizer, Policy, PolicyMeta};
use super::replay::{Experience, ReplayBuffer};
use super::schedule::EpsilonSchedule;
use super::AgentError;
use crate::nn::{DenseNet, Gradients, Optimizer, OutputActivation};
use crate::scalar::Scalar;
use crate::util::stable_hash_json;

/// Training hyperparameters. Defaults converge on the reference deployment
/// in a few minutes of desk time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentConfig {
    /// RL discount factor, in [0, 1).
    pub discount: f64,
    pub learning_rate: f64,
    pub buffer_capacity: usize,
    pub batch_size: usize,
    /// Copy the online net into the target net every this many steps.
    pub target_sync_interval: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: usize,
    pub episodes: usize,
    pub steps_per_episode: usize,
    pub hidden_sizes: Vec<usize>,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            discount: 0.95,
            learning_rate: 1e-3,
            buffer_capacity: 10_000,
            batch_size: 64,
            target_sync_interval: 200,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_steps: 5_000,
            episodes: 300,
            steps_per_episode: 100,
            hidden_sizes: vec![64, 64],
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let err = |msg: String| Err(AgentError::InvalidConfig(msg));
        if !(0.0..1.0).contains(&self.discount) {
            return err(format!("discount must lie in [0, 1), got {}", self.discount));
        }
        if self.learning_rate <= 0.0 {
            return err("learning rate must be positive".into());
        }
        for (name, v) in [
            ("buffer_capacity", self.buffer_capacity),
            ("batch_size", self.batch_size),
            ("target_sync_interval", self.target_sync_interval),
            ("episodes", self.episodes),
            ("steps_per_episode", self.steps_per_episode),
        ] {
            if v == 0 {
                return err(format!("{name} must be positive"));
            }
        }
        if !(self.epsilon_end <= self.epsilon_start && self.epsilon_start <= 1.0)
            || self.epsilon_end < 0.0
        {
            return err("epsilon schedule must satisfy 0 <= end <= start <= 1".into());
        }
        if self.hidden_sizes.is_empty() || self.hidden_sizes.iter().any(|&h| h == 0) {
            return err("hidden sizes must be non-empty and positive".into());
        }
        Ok(())
    }

    pub fn epsilon_schedule(&self) -> EpsilonSchedule {
        EpsilonSchedule {
            start: self.epsilon_start,
            end: self.epsilon_end,
            decay_steps: self.epsilon_decay_steps,
        }
    }
}

/// Result of one environment transition as the trainer sees it.
#[derive(Debug, Clone)]
pub struct EnvStep<T> {
    pub obs: Vec<T>,
    pub reward: T,
    /// Reporting metric accumulated into the per-episode training log.
    pub cost: T,
    pub terminal: bool,
}

/// Discrete-action environment the trainer can drive: the grid simulation
/// and the tabular verification MDPs both implement this.
pub trait QEnv<T> {
    fn obs_dim(&self) -> usize;
    fn action_count(&self) -> usize;
    /// Starts a fresh episode and returns the initial observation.
    fn reset(&mut self, seed: u64) -> Vec<T>;
    fn step(&mut self, action: usize) -> EnvStep<T>;
}

impl<T: Scalar> QEnv<T> for crate::env::GridEnv<T> {
    fn obs_dim(&self) -> usize {
        self.scenario().state_dim()
    }

    fn action_count(&self) -> usize {
        self.station_count()
    }

    fn reset(&mut self, seed: u64) -> Vec<T> {
        crate::env::GridEnv::reset(self, seed);
        self.observe().to_vec()
    }

    fn step(&mut self, action: usize) -> EnvStep<T> {
        let outcome = crate::env::GridEnv::step(self, action);
        EnvStep {
            obs: outcome.next_state.to_vec(),
            reward: outcome.reward,
            cost: outcome.info.cost,
            // The grid runs continuously; episode boundaries are the
            // trainer's step cap, which bootstraps rather than terminates.
            terminal: false,
        }
    }
}

/// One row of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeStats<T> {
    pub episode: usize,
    pub mean_reward: T,
    pub mean_cost: T,
    pub epsilon: f64,
}

/// Standard DQN targets: `r + discount * max_a' Q_target(s', a')` for
/// non-terminal transitions, `r` for terminal ones.
pub fn td_target<T: Scalar>(
    batch: &[&Experience<T>],
    target_net: &DenseNet<T>,
    normalizer: &Normalizer<T>,
    discount: T,
) -> Vec<T> {
    assert!(!batch.is_empty(), "td_target needs a non-empty batch");
    batch
        .iter()
        .map(|e| {
            if e.terminal {
                e.reward
            } else {
                let q_next = target_net.forward_output(&normalizer.apply(&e.next_state));
                let best = q_next
                    .into_iter()
                    .fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
                e.reward + discount * best
            }
        })
        .collect()
}

/// One minibatch regression step of `Q(s, a)` toward its TD target; only
/// the taken action's output carries gradient. Returns the mean squared TD
/// error, or `None` while the buffer is underfilled.
pub fn train_step<T: Scalar>(
    q_net: &mut DenseNet<T>,
    target_net: &DenseNet<T>,
    buffer: &ReplayBuffer<T>,
    optimizer: &mut Optimizer<T>,
    normalizer: &Normalizer<T>,
    config: &AgentConfig,
    rng: &mut ChaCha8Rng,
) -> Option<T> {
    if buffer.len() < config.batch_size {
        return None;
    }
    let batch = buffer.sample(config.batch_size, rng);
    let targets = td_target(&batch, target_net, normalizer, T::of(config.discount));

    let mut grads = Gradients::zeros_like(q_net);
    let mut loss = T::zero();
    let out_dim = q_net.output_dim();
    for (experience, &y) in batch.iter().zip(&targets) {
        let input = normalizer.apply(&experience.state);
        let (out, cache) = q_net.forward(&input);
        let td_error = out[experience.action] - y;
        loss += td_error * td_error;
        // d(mse)/d(out) with the target equal to the prediction everywhere
        // except the taken action.
        let mut out_grad = vec![T::zero(); out_dim];
        out_grad[experience.action] = T::of(2.0) * td_error / T::of(out_dim as f64);
        grads.add_assign(&q_net.backward(&cache, &out_grad));
    }
    let batch_size = T::of(config.batch_size as f64);
    grads.scale(T::one() / batch_size);
    optimizer.step(q_net, &grads);
    Some(loss / batch_size)
}

/// Runs the full training loop and freezes the result into a [`Policy`].
///
/// Deterministic per `seed`: network initialization, exploration, replay
/// sampling, and per-episode environment streams all derive from it.
pub fn train<T: Scalar, E: QEnv<T>>(
    env: &mut E,
    normalizer: &Normalizer<T>,
    config: &AgentConfig,
    seed: u64,
) -> Result<(Policy<T>, Vec<EpisodeStats<T>>), AgentError> {
    config.validate()?;
    assert_eq!(normalizer.dim(), env.obs_dim(), "normalizer/env mismatch");

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let net_seed = master.next_u64();
    let action_seed = master.next_u64();
    let replay_seed = master.next_u64();
    let episode_seed_base = master.next_u64();

    let mut sizes = vec![env.obs_dim()];
    sizes.extend_from_slice(&config.hidden_sizes);
    sizes.push(env.action_count());
    let mut q_net = DenseNet::<T>::he_uniform(&sizes, OutputActivation::Identity, net_seed);
    let mut target_net = q_net.clone();
    let mut buffer = ReplayBuffer::new(config.buffer_capacity);
    let mut optimizer = Optimizer::adam(T::of(config.learning_rate));
    let mut action_rng = ChaCha8Rng::seed_from_u64(action_seed);
    let mut replay_rng = ChaCha8Rng::seed_from_u64(replay_seed);
    let schedule = config.epsilon_schedule();

    let mut log = Vec::with_capacity(config.episodes);
    let mut global_step = 0usize;
    for episode in 0..config.episodes {
        let mut obs = env.reset(episode_seed_base.wrapping_add(episode as u64));
        let mut reward_sum = T::zero();
        let mut cost_sum = T::zero();
        let mut steps = 0usize;
        let episode_epsilon = schedule.value(global_step);
        for _ in 0..config.steps_per_episode {
            let epsilon = schedule.value(global_step);
            let action = select_action(&q_net, &normalizer.apply(&obs), epsilon, &mut action_rng);
            let step = env.step(action);
            buffer.push(Experience {
                state: obs,
                action,
                reward: step.reward,
                next_state: step.obs.clone(),
                terminal: step.terminal,
            });
            train_step(
                &mut q_net,
                &target_net,
                &buffer,
                &mut optimizer,
                normalizer,
                config,
                &mut replay_rng,
            );
            global_step += 1;
            if global_step % config.target_sync_interval == 0 {
                target_net = q_net.clone();
            }
            reward_sum += step.reward;
            cost_sum += step.cost;
            steps += 1;
            obs = step.obs;
            if step.terminal {
                break;
            }
        }
        let n = T::of(steps.max(1) as f64);
        log.push(EpisodeStats {
            episode,
            mean_reward: reward_sum / n,
            mean_cost: cost_sum / n,
            epsilon: episode_epsilon,
        });
    }

    let meta = PolicyMeta {
        seed,
        config_hash: stable_hash_json(config),
        actions: env.action_count(),
    };
    Ok((Policy::new(q_net, normalizer.clone(), meta), log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::tabular::{TabularMdp, ToyMdpEnv, Transition};

    fn identity_norm(dim: usize) -> Normalizer<f64> {
        Normalizer::identity(dim)
    }

    #[test]
    fn td_targets_follow_the_bellman_form() {
        let net = DenseNet::<f64>::zeros(&[2, 3], OutputActivation::Identity);
        let norm = identity_norm(2);
        let e = Experience {
            state: vec![0.0, 0.0],
            action: 1,
            reward: -0.2,
            next_state: vec![0.0, 0.0],
            terminal: false,
        };
        // Zero net: max Q_target = 0, y = r.
        let y = td_target(&[&e], &net, &norm, 0.95);
        assert_eq!(y, vec![-0.2]);

        // Discount zero: y = r regardless of the target net.
        let rich = DenseNet::<f64>::he_uniform(&[2, 4, 3], OutputActivation::Identity, 1);
        let y = td_target(&[&e], &rich, &norm, 0.0);
        assert_eq!(y, vec![-0.2]);

        // Terminal: y = r even with a non-trivial target net.
        let et = Experience { terminal: true, ..e.clone() };
        let y = td_target(&[&et], &rich, &norm, 0.95);
        assert_eq!(y, vec![-0.2]);
    }

    /// Hand arithmetic: r=-0.2, discount 0.95, max Q_target = -1.0.
    #[test]
    fn td_target_hand_value() {
        let mut net = DenseNet::<f64>::zeros(&[1, 2], OutputActivation::Identity);
        // Biases pin Q_target = [-1.0, -3.0].
        net.set_param(2, -1.0);
        net.set_param(3, -3.0);
        let e = Experience {
            state: vec![0.0],
            action: 0,
            reward: -0.2,
            next_state: vec![0.0],
            terminal: false,
        };
        let y = td_target(&[&e], &net, &identity_norm(1), 0.95);
        assert!((y[0] - (-1.15)).abs() < 1e-12);
    }

    #[test]
    fn train_step_skips_until_buffer_holds_a_batch() {
        let mut q = DenseNet::<f64>::he_uniform(&[2, 4, 2], OutputActivation::Identity, 0);
        let target = q.clone();
        let mut buffer = ReplayBuffer::new(100);
        let mut opt = Optimizer::adam(1e-3);
        let config = AgentConfig {
            batch_size: 4,
            ..AgentConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let norm = identity_norm(2);
        buffer.push(Experience {
            state: vec![0.0, 0.0],
            action: 0,
            reward: 0.0,
            next_state: vec![0.0, 0.0],
            terminal: false,
        });
        assert!(train_step(&mut q, &target, &buffer, &mut opt, &norm, &config, &mut rng).is_none());
    }

    #[test]
    fn repeated_identical_transitions_converge_to_the_td_target() {
        let mut q = DenseNet::<f64>::he_uniform(&[2, 8, 2], OutputActivation::Identity, 5);
        let mut buffer = ReplayBuffer::new(64);
        for _ in 0..64 {
            buffer.push(Experience {
                state: vec![0.5, -0.5],
                action: 1,
                reward: -0.7,
                next_state: vec![0.5, -0.5],
                terminal: true,
            });
        }
        let config = AgentConfig {
            batch_size: 32,
            learning_rate: 5e-3,
            ..AgentConfig::default()
        };
        let norm = identity_norm(2);
        let mut opt = Optimizer::adam(config.learning_rate);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let target = q.clone(); // irrelevant: all transitions terminal
        let mut last_loss = f64::INFINITY;
        for _ in 0..3000 {
            last_loss =
                train_step(&mut q, &target, &buffer, &mut opt, &norm, &config, &mut rng)
                    .expect("buffer filled");
            assert!(last_loss >= 0.0);
        }
        assert!(last_loss < 1e-6, "loss {last_loss}");
        let out = q.forward_output(&[0.5, -0.5]);
        assert!((out[1] - (-0.7)).abs() < 1e-3, "Q={out:?}");
    }

    fn two_action_bandit() -> ToyMdpEnv {
        // Single state, action 0 pays 1, action 1 pays 0; episode ends.
        let mdp = TabularMdp::new(
            1,
            2,
            vec![vec![
                Transition { next: 0, reward: 1.0, terminal: true },
                Transition { next: 0, reward: 0.0, terminal: true },
            ]],
        );
        ToyMdpEnv::new(mdp, 10)
    }

    #[test]
    fn training_log_has_one_row_per_episode() {
        let mut env = two_action_bandit();
        let config = AgentConfig {
            episodes: 7,
            steps_per_episode: 5,
            buffer_capacity: 50,
            batch_size: 4,
            epsilon_decay_steps: 10,
            hidden_sizes: vec![8],
            ..AgentConfig::default()
        };
        let norm = identity_norm(1);
        let (_, log) = train(&mut env, &norm, &config, 3).unwrap();
        assert_eq!(log.len(), 7);
        for (i, row) in log.iter().enumerate() {
            assert_eq!(row.episode, i);
        }
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let config = AgentConfig {
            episodes: 10,
            steps_per_episode: 5,
            buffer_capacity: 64,
            batch_size: 8,
            epsilon_decay_steps: 20,
            hidden_sizes: vec![8],
            ..AgentConfig::default()
        };
        let norm = identity_norm(1);
        let (p1, log1) = train(&mut two_action_bandit(), &norm, &config, 99).unwrap();
        let (p2, log2) = train(&mut two_action_bandit(), &norm, &config, 99).unwrap();
        assert_eq!(p1.to_json(), p2.to_json());
        assert_eq!(log1, log2);
    }

    #[test]
    fn target_net_changes_only_at_sync_steps() {
        // Drive train_step manually and snapshot the target between syncs.
        let mut env = two_action_bandit();
        let config = AgentConfig {
            batch_size: 4,
            target_sync_interval: 10,
            buffer_capacity: 64,
            hidden_sizes: vec![8],
            ..AgentConfig::default()
        };
        let norm = identity_norm(1);
        let mut q = DenseNet::<f64>::he_uniform(&[1, 8, 2], OutputActivation::Identity, 2);
        let mut target = q.clone();
        let mut buffer = ReplayBuffer::new(config.buffer_capacity);
        let mut opt = Optimizer::adam(1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut obs = env.reset(0);
        let frozen = target.to_json();
        for step in 1..=25usize {
            let action = step % 2;
            let out = env.step(action);
            buffer.push(Experience {
                state: obs,
                action,
                reward: out.reward,
                next_state: out.obs.clone(),
                terminal: out.terminal,
            });
            obs = if out.terminal { env.reset(step as u64) } else { out.obs };
            train_step(&mut q, &target, &buffer, &mut opt, &norm, &config, &mut rng);
            if step % config.target_sync_interval == 0 {
                target = q.clone();
            } else if step < config.target_sync_interval {
                assert_eq!(target.to_json(), frozen, "target drifted at step {step}");
            }
        }
        assert_ne!(target.to_json(), frozen, "target never synced");
    }

    #[test]
    fn invalid_config_is_rejected() {
        let config = AgentConfig {
            discount: 1.0,
            ..AgentConfig::default()
        };
        assert!(config.validate().is_err());
        let config = AgentConfig {
            epsilon_start: 0.1,
            epsilon_end: 0.9,
            ..AgentConfig::default()
        };
        assert!(config.validate().is_err());
    }
}
