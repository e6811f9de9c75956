//! Energy-demand-management tasks and their generation ranges.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// One energy-demand-management job issued by a smart meter.
///
/// Demand and monitoring payloads are kept separate; every cost formula uses
/// the exact sums `total_bits` and `total_cycles`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdmTask<T> {
    pub id: u64,
    /// Demand-data payload, bits.
    pub demand_bits: T,
    /// Monitoring-data payload, bits.
    pub monitor_bits: T,
    /// CPU cycles to process the demand data.
    pub demand_cycles: T,
    /// CPU cycles to process the monitoring data.
    pub monitor_cycles: T,
    /// Latency budget, seconds.
    pub qos_latency: T,
    /// Simulation time the task was issued, seconds.
    pub timestamp: T,
    /// Originating meter index.
    pub meter_id: usize,
}

impl<T: Scalar> EdmTask<T> {
    /// Total payload `D_s = D_d + D_m`, bits.
    pub fn total_bits(&self) -> T {
        self.demand_bits + self.monitor_bits
    }

    /// Total compute demand `C_s = C_d + C_m`, cycles.
    pub fn total_cycles(&self) -> T {
        self.demand_cycles + self.monitor_cycles
    }

    pub fn validate(&self) -> bool {
        self.demand_bits > T::zero()
            && self.monitor_bits > T::zero()
            && self.demand_cycles > T::zero()
            && self.monitor_cycles > T::zero()
            && self.qos_latency > T::zero()
    }
}

/// Uniform sampling ranges for task fields, in bits and cycles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskRanges {
    pub demand_bits: (f64, f64),
    pub monitor_bits: (f64, f64),
    pub demand_cycles: (f64, f64),
    pub monitor_cycles: (f64, f64),
}

impl Default for TaskRanges {
    /// Demand 100-400 kilobits, monitoring 0.5-1 megabits, demand compute
    /// 0.1-0.4 gigacycles, monitoring compute 0.5-1 gigacycles.
    fn default() -> Self {
        Self {
            demand_bits: (100e3, 400e3),
            monitor_bits: (0.5e6, 1e6),
            demand_cycles: (0.1e9, 0.4e9),
            monitor_cycles: (0.5e9, 1e9),
        }
    }
}

impl TaskRanges {
    pub fn validate(&self) -> Result<(), String> {
        for (name, (lo, hi)) in [
            ("demand_bits", self.demand_bits),
            ("monitor_bits", self.monitor_bits),
            ("demand_cycles", self.demand_cycles),
            ("monitor_cycles", self.monitor_cycles),
        ] {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(format!("task range {name} must satisfy 0 < lo <= hi"));
            }
        }
        Ok(())
    }

    pub fn mean_total_cycles(&self) -> f64 {
        (self.demand_cycles.0 + self.demand_cycles.1) / 2.0
            + (self.monitor_cycles.0 + self.monitor_cycles.1) / 2.0
    }

    pub fn max_total_bits(&self) -> f64 {
        self.demand_bits.1 + self.monitor_bits.1
    }

    pub fn max_total_cycles(&self) -> f64 {
        self.demand_cycles.1 + self.monitor_cycles.1
    }
}

/// Draws one task with uniform fields; deterministic in the generator state.
pub fn gen_task<T: Scalar>(
    rng: &mut ChaCha8Rng,
    ranges: &TaskRanges,
    id: u64,
    meter_id: usize,
    now: T,
    qos_latency: T,
) -> EdmTask<T> {
    let draw = |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| -> T {
        if hi > lo {
            T::of(rng.random_range(lo..hi))
        } else {
            T::of(lo)
        }
    };
    EdmTask {
        id,
        demand_bits: draw(rng, ranges.demand_bits),
        monitor_bits: draw(rng, ranges.monitor_bits),
        demand_cycles: draw(rng, ranges.demand_cycles),
        monitor_cycles: draw(rng, ranges.monitor_cycles),
        qos_latency,
        timestamp: now,
        meter_id,
    }
}
