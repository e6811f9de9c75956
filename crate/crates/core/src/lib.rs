//! Edge task-offloading simulator for smart-meter workloads.
//!
//! The crate is organized around five subsystems:
//!
//! - [`env`]: the deterministic edge-network simulation (topology, channel
//!   model, per-station queues, task generation, MDP step/observe interface),
//! - [`nn`]: minimal dense-network numerics (forward, exact backprop,
//!   first-order optimizers) shared by the agent and the MLP detector,
//! - [`agent`]: the DQN offloading agent (replay buffer, target network,
//!   epsilon-greedy training, frozen policies, evaluation),
//! - [`attack`]: the false-state-injection adversary that poisons reported
//!   per-station data rates with a mean-shifted normal,
//! - [`detect`]: supervised classifiers that detect and localize a
//!   compromised station from observed state vectors.
//!
//! All numeric code is generic over [`scalar::Scalar`] (any `f32`/`f64`-like
//! float via `num-traits`); the aliases below pin the concrete types used by
//! the command-line harness.

pub mod agent;
pub mod attack;
pub mod detect;
pub mod env;
pub mod nn;
pub mod scalar;
pub mod util;

pub use scalar::Scalar;

/// Default scalar for simulations and the CLI harness.
pub type Real = f64;

/// `f64` dense matrix.
pub type Matrix64 = nn::Matrix<f64>;
/// `f32` dense matrix.
pub type Matrix32 = nn::Matrix<f32>;
/// `f64` dense network.
pub type DenseNet64 = nn::DenseNet<f64>;
/// `f32` dense network.
pub type DenseNet32 = nn::DenseNet<f32>;
/// `f64` simulation environment.
pub type GridEnv64 = env::GridEnv<f64>;
/// `f64` frozen offloading policy.
pub type Policy64 = agent::Policy<f64>;
