//! Deterministic edge-network simulation: topology, channel and rate model,
//! per-station queues, task generation, and the step/observe interface the
//! offloading agent consumes.

mod cost;
mod radio;
mod sim;
mod task;
mod topology;

pub use cost::{exec_time, offload_cost, queue_latency, tx_energy, CostParams};
pub use radio::{channel_gain, data_rate, ChannelParams};
pub use sim::{GridEnv, Scenario, ScenarioParams, StateVector, StepInfo, StepOutcome};
pub use task::{EdmTask, TaskRanges};
pub use topology::{BaseStation, SmartMeter, Topology};

use thiserror::Error;

/// Errors from scenario construction and cost/rate evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("meter {meter} is not covered by station {station}")]
    NotCovered { meter: usize, station: usize },
    #[error("meter {meter} is not covered by any station")]
    CoverageViolation { meter: usize },
    #[error("transmission rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("CPU rate must be positive, got {0}")]
    NonPositiveCpuRate(f64),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// Transforms an observation before the agent sees it.
///
/// The identity transform leaves evaluation untouched; the false-state
/// injector replaces reported data rates.
pub trait StateTransform<T> {
    fn transform(&mut self, state: &StateVector<T>) -> StateVector<T>;
}

/// The transform that changes nothing.
pub struct IdentityTransform;

impl<T: Clone> StateTransform<T> for IdentityTransform {
    fn transform(&mut self, state: &StateVector<T>) -> StateVector<T> {
        state.clone()
    }
}
