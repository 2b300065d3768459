//! Position hold: lateral error → tilt setpoints, vertical error → thrust.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::pid::{Pid, PidGains};
use super::sensor::SensorReading;
use crate::env::gravity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionGains {
    /// Horizontal error (m) → acceleration demand (m/s²), per axis.
    pub lateral: PidGains,
    pub vertical: PidGains,
    pub tilt_limit_rad: f64,
}

impl Default for PositionGains {
    fn default() -> Self {
        Self {
            lateral: PidGains::new(1.0, 0.1, 1.6, 3.0, 0.5),
            vertical: PidGains::new(2.0, 0.5, 2.5, 7.0, 2.0),
            tilt_limit_rad: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionOutput {
    pub roll: f64,
    pub pitch: f64,
    /// Thrust along the body axis, N.
    pub thrust: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionController {
    gains: PositionGains,
    north: Pid,
    west: Pid,
    up: Pid,
}

impl PositionController {
    pub fn new(gains: PositionGains) -> Self {
        Self {
            gains,
            north: Pid::new(gains.lateral),
            west: Pid::new(gains.lateral),
            up: Pid::new(gains.vertical),
        }
    }

    pub fn reset(&mut self) {
        self.north.reset();
        self.west.reset();
        self.up.reset();
    }

    /// Lateral channel only: world horizontal error → `(roll, pitch)`.
    pub fn lateral(&mut self, setpoint: &Vector3<f64>, reading: &SensorReading, dt: f64) -> (f64, f64) {
        let a_n = self.north.update(setpoint.x, reading.position.x, dt);
        let a_w = self.west.update(setpoint.y, reading.position.y, dt);
        let (_, _, psi) = reading.euler_angles();
        let a_e = -a_w;
        let (s, c) = psi.sin_cos();
        let fwd = c * a_n + s * a_e;
        let right = -s * a_n + c * a_e;
        let g = gravity();
        let lim = self.gains.tilt_limit_rad;
        ((right / g).clamp(-lim, lim), (-fwd / g).clamp(-lim, lim))
    }

    pub fn update(&mut self, setpoint: &Vector3<f64>, reading: &SensorReading, mass: f64, dt: f64) -> PositionOutput {
        let (roll, pitch) = self.lateral(setpoint, reading, dt);
        let a_up = self.up.update(setpoint.z, reading.position.z, dt);
        let (phi, theta, _) = reading.euler_angles();
        let tilt = (phi.cos() * theta.cos()).max(0.5);
        PositionOutput {
            roll,
            pitch,
            thrust: mass * (gravity() + a_up) / tilt,
        }
    }
}
