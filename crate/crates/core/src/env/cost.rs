//! Execution time, transmission energy, and the weighted offloading cost.

use serde::{Deserialize, Serialize};

use super::{BaseStation, EdmTask, EnvError};
use crate::scalar::Scalar;

/// Weights of the offloading objective and reward.
///
/// `xi` balances latency against energy in the per-task cost; `delta1` and
/// `delta2` weight the same two terms in the reward. The defaults tie them
/// together (`delta1 = xi`, `delta2 = 1 - xi`) so the accumulated negative
/// reward equals the accumulated cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams<T> {
    pub xi: T,
    pub delta1: T,
    pub delta2: T,
}

impl<T: Scalar> CostParams<T> {
    pub fn new(xi: T, delta1: T, delta2: T) -> Result<Self, EnvError> {
        if xi < T::zero() || xi > T::one() {
            return Err(EnvError::InvalidScenario(format!(
                "xi must lie in [0, 1], got {xi}"
            )));
        }
        if delta1 < T::zero() || delta2 < T::zero() {
            return Err(EnvError::InvalidScenario(
                "reward weights must be non-negative".into(),
            ));
        }
        Ok(Self { xi, delta1, delta2 })
    }

    /// `delta1 = xi`, `delta2 = 1 - xi`.
    pub fn balanced(xi: T) -> Result<Self, EnvError> {
        Self::new(xi, xi, T::one() - xi)
    }
}

/// Time to ship and process one task: `D_s / rate + C_s / cpu_rate`.
pub fn exec_time<T: Scalar>(task: &EdmTask<T>, rate: T, cpu_rate: T) -> Result<T, EnvError> {
    if rate <= T::zero() {
        return Err(EnvError::NonPositiveRate(rate.to_real()));
    }
    if cpu_rate <= T::zero() {
        return Err(EnvError::NonPositiveCpuRate(cpu_rate.to_real()));
    }
    Ok(task.total_bits() / rate + task.total_cycles() / cpu_rate)
}

/// Meter-side transmission energy: `P * D_s / rate`.
pub fn tx_energy<T: Scalar>(task: &EdmTask<T>, rate: T, tx_power: T) -> Result<T, EnvError> {
    if rate <= T::zero() {
        return Err(EnvError::NonPositiveRate(rate.to_real()));
    }
    Ok(tx_power * task.total_bits() / rate)
}

/// Per-task objective term: `xi * exec_time + (1 - xi) * tx_energy`.
pub fn offload_cost<T: Scalar>(
    task: &EdmTask<T>,
    station: &BaseStation<T>,
    tx_power: T,
    rate: T,
    params: &CostParams<T>,
) -> Result<T, EnvError> {
    let t = exec_time(task, rate, station.cpu_rate)?;
    let e = tx_energy(task, rate, tx_power)?;
    Ok(params.xi * t + (T::one() - params.xi) * e)
}

/// Pending work over capacity: `queue_backlog / cpu_rate`, seconds.
pub fn queue_latency<T: Scalar>(station: &BaseStation<T>) -> T {
    station.queue_backlog / station.cpu_rate
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(bits: f64, cycles: f64) -> EdmTask<f64> {
        EdmTask {
            id: 0,
            demand_bits: bits / 2.0,
            monitor_bits: bits / 2.0,
            demand_cycles: cycles / 2.0,
            monitor_cycles: cycles / 2.0,
            qos_latency: 1.0,
            timestamp: 0.0,
            meter_id: 0,
        }
    }

    fn station(cpu_rate: f64) -> BaseStation<f64> {
        BaseStation {
            id: 0,
            position: (0.0, 0.0),
            bandwidth: 1e7,
            cpu_rate,
            queue_backlog: 0.0,
            arrival_rate: 0.0,
            processing_rate: 16.0,
            coverage_radius: 300.0,
        }
    }

    #[test]
    fn exec_time_hand_values() {
        // 1e6 b at 1e7 b/s plus 1e9 cycles at 16 GHz.
        let t = exec_time(&task(1e6, 1e9), 1e7, 1.6e10).unwrap();
        assert!((t - 0.1625).abs() < 1e-12);

        let t = exec_time(&task(8e5, 1e-300), 8e6, 1.6e10).unwrap();
        assert!((t - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_workload_costs_nothing() {
        let t = exec_time(&task(1e-300, 1e-300), 1e7, 1.6e10).unwrap();
        assert!(t.abs() < 1e-12);
        let e = tx_energy(&task(1e-300, 1.0), 1e7, 0.5).unwrap();
        assert!(e.abs() < 1e-12);
    }

    #[test]
    fn tx_energy_hand_values_and_linearity() {
        let e = tx_energy(&task(1e6, 1e9), 1e7, 0.5).unwrap();
        assert!((e - 0.05).abs() < 1e-15);
        let e2 = tx_energy(&task(2e6, 1e9), 1e7, 0.5).unwrap();
        assert!((e2 - 0.1).abs() < 1e-15);
        assert!((e2 - 2.0 * e).abs() < 1e-15);
    }

    #[test]
    fn doubling_payload_doubles_time_and_energy_at_fixed_rate() {
        let t1 = exec_time(&task(1e6, 1e-300), 1e7, 1.6e10).unwrap();
        let t2 = exec_time(&task(2e6, 1e-300), 1e7, 1.6e10).unwrap();
        assert!((t2 - 2.0 * t1).abs() < 1e-15);
    }

    #[test]
    fn offload_cost_weights_time_and_energy() {
        let params = CostParams::balanced(0.5).unwrap();
        let c = offload_cost(&task(1e6, 1e9), &station(1.6e10), 0.5, 1e7, &params).unwrap();
        assert!((c - 0.10625).abs() < 1e-12);

        let all_time = CostParams::balanced(1.0).unwrap();
        let c = offload_cost(&task(1e6, 1e9), &station(1.6e10), 0.5, 1e7, &all_time).unwrap();
        assert!((c - 0.1625).abs() < 1e-12);

        let all_energy = CostParams::balanced(0.0).unwrap();
        let c = offload_cost(&task(1e6, 1e9), &station(1.6e10), 0.5, 1e7, &all_energy).unwrap();
        assert!((c - 0.05).abs() < 1e-15);
    }

    #[test]
    fn non_positive_inputs_are_rejected() {
        assert!(matches!(
            exec_time(&task(1e6, 1e9), 0.0, 1.6e10),
            Err(EnvError::NonPositiveRate(_))
        ));
        assert!(matches!(
            exec_time(&task(1e6, 1e9), 1e7, -1.0),
            Err(EnvError::NonPositiveCpuRate(_))
        ));
        assert!(matches!(
            tx_energy(&task(1e6, 1e9), -2.0, 0.5),
            Err(EnvError::NonPositiveRate(_))
        ));
    }

    #[test]
    fn queue_latency_hand_values() {
        let mut s = station(1.6e10);
        assert_eq!(queue_latency(&s), 0.0);
        s.queue_backlog = 1.6e9;
        assert!((queue_latency(&s) - 0.1).abs() < 1e-15);
        s.queue_backlog = 8e9;
        assert!((queue_latency(&s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cost_params_validation() {
        assert!(CostParams::new(1.5, 0.5, 0.5).is_err());
        assert!(CostParams::new(0.5, -0.1, 0.5).is_err());
        let p = CostParams::balanced(0.25).unwrap();
        assert_eq!(p.delta1, 0.25);
        assert_eq!(p.delta2, 0.75);
    }
}
