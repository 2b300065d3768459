//! Microgravity vertical-acceleration loop.
//!
//! Feedforward thrust cancels predicted drag; this loop trims the residual
//! measured specific force along the thrust axis towards zero.

use serde::{Deserialize, Serialize};

use super::filter::LowPass2;
use super::pid::{Pid, PidGains};
use super::sensor::{SensorReading, ACCEL_FILTER_HZ};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerticalGains {
    /// Filtered specific-force error (m/s²) → acceleration correction (m/s²).
    pub pid: PidGains,
    /// Time after entering microgravity before the loop closes, s. Lets the
    /// servos finish the slew away from full thrust.
    pub entry_delay_s: f64,
}

impl Default for VerticalGains {
    fn default() -> Self {
        Self {
            pid: PidGains::new(0.1, 2.0, 0.0, 2.0, 1.0),
            entry_delay_s: 0.06,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerticalAccelController {
    gains: VerticalGains,
    pid: Pid,
    filter: LowPass2,
    entered_at: Option<f64>,
    armed: bool,
    /// Last filtered measurement.
    pub filtered: f64,
}

impl VerticalAccelController {
    pub fn new(gains: VerticalGains, dt: f64) -> Self {
        Self {
            gains,
            pid: Pid::new(gains.pid),
            filter: LowPass2::new(ACCEL_FILTER_HZ, 1.0 / dt),
            entered_at: None,
            armed: false,
            filtered: 0.0,
        }
    }

    pub fn enter(&mut self, t: f64) {
        self.entered_at = Some(t);
        self.armed = false;
        self.pid.reset();
        self.filter.reset();
    }

    pub fn is_armed(&self) -> bool {
        self.armed
    }

    /// Acceleration correction in m/s² along the thrust axis (positive means
    /// more upward thrust). Zero until armed.
    pub fn update(&mut self, reading: &SensorReading, dt: f64) -> f64 {
        let Some(t0) = self.entered_at else {
            return 0.0;
        };
        if !self.armed {
            if reading.t - t0 + 1e-9 < self.gains.entry_delay_s {
                return 0.0;
            }
            self.armed = true;
        }
        self.filtered = self.filter.update(reading.vertical_accel());
        self.pid.update(0.0, self.filtered, dt)
    }
}
