//! The DQN offloading agent: epsilon-greedy acting, replay buffer, target
//! network, centralized training producing a frozen policy, and evaluation
//! against baseline deciders.

mod eval;
mod policy;
mod replay;
mod schedule;
mod tabular;
mod trainer;

pub use eval::{evaluate, Decider, EvalMetrics};
pub use policy::{select_action, Normalizer, Policy, PolicyMeta};
pub use replay::{Experience, ReplayBuffer};
pub use schedule::EpsilonSchedule;
pub use tabular::{delayed_reward_chain, TabularMdp, ToyMdpEnv, Transition};
pub use trainer::{td_target, train, train_step, AgentConfig, EnvStep, EpisodeStats, QEnv};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AgentError {
    #[error("invalid agent config: {0}")]
    InvalidConfig(String),
    #[error("policy file is malformed: {0}")]
    MalformedPolicy(String),
}
