//! Physical layout: meters, stations, and the coverage matrix.

use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::scalar::Scalar;

/// A smart meter: position in the deployment square and transmit power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmartMeter<T> {
    pub id: usize,
    /// Position, meters.
    pub position: (T, T),
    /// Transmit power, watts.
    pub tx_power: T,
}

/// An edge base station with its static capacity and live queue state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation<T> {
    pub id: usize,
    /// Position, meters.
    pub position: (T, T),
    /// Bandwidth, Hz.
    pub bandwidth: T,
    /// Compute capacity, cycles/second.
    pub cpu_rate: T,
    /// Cycles currently queued.
    pub queue_backlog: T,
    /// Exponentially smoothed observed task arrival rate, tasks/second.
    pub arrival_rate: T,
    /// Task processing rate derived from `cpu_rate` and the scenario's mean
    /// task cycle demand, tasks/second.
    pub processing_rate: T,
    /// Coverage radius, meters.
    pub coverage_radius: T,
}

impl<T: Scalar> BaseStation<T> {
    /// Stability flag from the arrival/processing-rate comparison; an
    /// overloaded station is reported, not halted.
    pub fn is_overloaded(&self) -> bool {
        self.arrival_rate >= self.processing_rate
    }
}

/// Meters, stations, and which station covers which meter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology<T> {
    pub meters: Vec<SmartMeter<T>>,
    pub stations: Vec<BaseStation<T>>,
    /// `coverage[meter][station]`.
    coverage: Vec<Vec<bool>>,
    /// Background noise power, watts.
    pub noise_power: T,
}

pub(crate) fn distance<T: Scalar>(a: (T, T), b: (T, T)) -> T {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

impl<T: Scalar> Topology<T> {
    /// Builds the coverage matrix from positions and radii and rejects any
    /// layout that leaves a meter without a covering station.
    pub fn new(
        meters: Vec<SmartMeter<T>>,
        stations: Vec<BaseStation<T>>,
        noise_power: T,
    ) -> Result<Self, EnvError> {
        let coverage: Vec<Vec<bool>> = meters
            .iter()
            .map(|m| {
                stations
                    .iter()
                    .map(|s| distance(m.position, s.position) <= s.coverage_radius)
                    .collect()
            })
            .collect();
        for (i, row) in coverage.iter().enumerate() {
            if !row.iter().any(|&c| c) {
                return Err(EnvError::CoverageViolation { meter: i });
            }
        }
        Ok(Self {
            meters,
            stations,
            coverage,
            noise_power,
        })
    }

    pub fn covered(&self, meter: usize, station: usize) -> bool {
        self.coverage[meter][station]
    }

    pub fn covering_stations(&self, meter: usize) -> impl Iterator<Item = usize> + '_ {
        self.coverage[meter]
            .iter()
            .enumerate()
            .filter_map(|(k, &c)| c.then_some(k))
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    pub fn meter_count(&self) -> usize {
        self.meters.len()
    }

    /// Stations currently flagged unstable per the arrival-vs-processing
    /// rate check.
    pub fn overloaded_stations(&self) -> Vec<usize> {
        self.stations
            .iter()
            .filter_map(|s| s.is_overloaded().then_some(s.id))
            .collect()
    }
}
