//! Channel gain and shared-bandwidth transmission rate.

use serde::{Deserialize, Serialize};

use super::topology::distance;
use super::{BaseStation, EnvError, SmartMeter, Topology};
use crate::scalar::Scalar;

/// Deterministic path-loss channel: `gain = gain_at_1m * d^-exponent` with
/// the distance clamped to at least one meter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    pub gain_at_1m: f64,
    pub exponent: f64,
    /// Spectral-efficiency ceiling, bits/s/Hz: modulation-and-coding
    /// schemes saturate, so `log2(1 + SINR)` is clamped here.
    pub max_spectral_efficiency: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            gain_at_1m: 1e-4,
            exponent: 4.0,
            max_spectral_efficiency: 9.0,
        }
    }
}

/// Path-loss gain between a meter and a station.
pub fn channel_gain<T: Scalar>(
    channel: &ChannelParams,
    meter: &SmartMeter<T>,
    station: &BaseStation<T>,
) -> T {
    let d = distance(meter.position, station.position).max(T::one());
    T::of(channel.gain_at_1m) * d.powf(-T::of(channel.exponent))
}

/// Transmission rate in bits/second for `meter` on `station`, sharing the
/// band with `co_assigned` concurrently transmitting meters.
///
/// `rate = (B / N) * log2(1 + P*C / (noise + sum of interference))` with
/// `N = 1 + |co_assigned|` (equal bandwidth sharing) and interference summed
/// as each co-assigned meter's received power at this station.
pub fn data_rate<T: Scalar>(
    topology: &Topology<T>,
    channel: &ChannelParams,
    meter_id: usize,
    station_id: usize,
    co_assigned: &[usize],
) -> Result<T, EnvError> {
    if !topology.covered(meter_id, station_id) {
        return Err(EnvError::NotCovered {
            meter: meter_id,
            station: station_id,
        });
    }
    let meter = &topology.meters[meter_id];
    let station = &topology.stations[station_id];
    let signal = meter.tx_power * channel_gain(channel, meter, station);
    let mut interference = T::zero();
    for &other in co_assigned {
        debug_assert_ne!(other, meter_id, "a meter cannot interfere with itself");
        let o = &topology.meters[other];
        interference += o.tx_power * channel_gain(channel, o, station);
    }
    let sinr = signal / (topology.noise_power + interference);
    let share = station.bandwidth / T::of((1 + co_assigned.len()) as f64);
    let efficiency = (T::one() + sinr)
        .log2()
        .min(T::of(channel.max_spectral_efficiency));
    Ok(share * efficiency)
}
