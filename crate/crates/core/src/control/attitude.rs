//! Angle → rate → moment cascade.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::pid::{Pid, PidGains};
use super::sensor::SensorReading;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttitudeGains {
    /// Angle error (rad) → body-rate setpoint (rad/s).
    pub roll_angle: PidGains,
    pub pitch_angle: PidGains,
    pub yaw_angle: PidGains,
    /// Rate error (rad/s) → angular acceleration demand (rad/s²).
    pub roll_rate: PidGains,
    pub pitch_rate: PidGains,
    pub yaw_rate: PidGains,
}

impl Default for AttitudeGains {
    fn default() -> Self {
        let angle = PidGains::new(5.0, 0.0, 0.0, 3.0, 1.0);
        let rate = PidGains::new(20.0, 2.0, 0.0, 200.0, 20.0);
        Self {
            roll_angle: angle,
            pitch_angle: angle,
            yaw_angle: PidGains::new(2.0, 0.0, 0.0, 1.0, 1.0),
            roll_rate: rate,
            pitch_rate: rate,
            yaw_rate: PidGains::new(5.0, 0.5, 0.0, 20.0, 5.0),
        }
    }
}

pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttitudeController {
    angle: [Pid; 3],
    rate: [Pid; 3],
    /// Last body-rate setpoint, for telemetry.
    pub rate_setpoint: Vector3<f64>,
    /// Last angular acceleration demand.
    pub accel_demand: Vector3<f64>,
}

impl AttitudeController {
    pub fn new(g: &AttitudeGains) -> Self {
        Self {
            angle: [Pid::new(g.roll_angle), Pid::new(g.pitch_angle), Pid::new(g.yaw_angle)],
            rate: [Pid::new(g.roll_rate), Pid::new(g.pitch_rate), Pid::new(g.yaw_rate)],
            rate_setpoint: Vector3::zeros(),
            accel_demand: Vector3::zeros(),
        }
    }

    pub fn reset(&mut self) {
        self.angle.iter_mut().chain(self.rate.iter_mut()).for_each(Pid::reset);
    }

    /// Full cascade. `authority` is the angular acceleration one unit of each
    /// normalised moment command produces; the result is `(R, P, Y)`.
    pub fn update(
        &mut self,
        setpoint: (f64, f64, f64),
        reading: &SensorReading,
        authority: [f64; 3],
        dt: f64,
    ) -> [f64; 3] {
        let (phi, theta, psi) = reading.euler_angles();
        let errors = [setpoint.0 - phi, setpoint.1 - theta, wrap_angle(setpoint.2 - psi)];
        let meas = [phi, theta, psi];
        let sp = Vector3::from_fn(|i, _| self.angle[i].update_error(errors[i], meas[i], dt));
        self.update_rates(sp, reading, authority, dt)
    }

    /// Inner loop only.
    pub fn update_rates(
        &mut self,
        rate_setpoint: Vector3<f64>,
        reading: &SensorReading,
        authority: [f64; 3],
        dt: f64,
    ) -> [f64; 3] {
        self.rate_setpoint = rate_setpoint;
        self.accel_demand = Vector3::from_fn(|i, _| self.rate[i].update(rate_setpoint[i], reading.rates[i], dt));
        std::array::from_fn(|i| self.accel_demand[i] / authority[i])
    }
}
