//! Linear epsilon decay schedule.

use serde::{Deserialize, Serialize};

/// Linearly interpolates from `start` to `end` over `decay_steps` global
/// steps, then holds at `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_steps: usize,
}

impl EpsilonSchedule {
    pub fn value(&self, step: usize) -> f64 {
        if self.decay_steps == 0 || step >= self.decay_steps {
            return self.end;
        }
        let fraction = step as f64 / self.decay_steps as f64;
        self.start + (self.end - self.start) * fraction
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reaches_end_at_decay_step_and_stays() {
        let s = EpsilonSchedule {
            start: 1.0,
            end: 0.05,
            decay_steps: 100,
        };
        assert_eq!(s.value(0), 1.0);
        assert_eq!(s.value(100), 0.05);
        assert_eq!(s.value(10_000), 0.05);
        assert!((s.value(50) - 0.525).abs() < 1e-12);
    }

    #[test]
    fn is_non_increasing() {
        let s = EpsilonSchedule {
            start: 0.9,
            end: 0.1,
            decay_steps: 57,
        };
        let mut prev = f64::INFINITY;
        for step in 0..200 {
            let e = s.value(step);
            assert!(e <= prev + 1e-15);
            prev = e;
        }
    }
}
