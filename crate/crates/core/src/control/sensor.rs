//! Onboard measurements: accelerometer, gyro, attitude and navigation.

use nalgebra::{Quaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::filter::LowPass2;
use crate::dynamics::SimState;

/// Cut-off of the vertical-acceleration filter, Hz.
pub const ACCEL_FILTER_HZ: f64 = 8.0;

/// White-noise standard deviations. All zero by default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorNoise {
    pub accel_std_m_s2: f64,
    pub gyro_std_rad_s: f64,
    pub position_std_m: f64,
    pub velocity_std_m_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorReading {
    pub t: f64,
    /// Body-axis specific force, m/s².
    pub specific_force: Vector3<f64>,
    pub rates: Vector3<f64>,
    pub attitude: Quaternion<f64>,
    /// World position and velocity (north-west-up).
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    /// Low-passed upward specific force along the thrust axis, m/s².
    pub filtered_vertical_accel: f64,
}

impl SensorReading {
    pub fn euler_angles(&self) -> (f64, f64, f64) {
        crate::dynamics::state::euler_from_quaternion(&self.attitude)
    }

    /// Upward specific force along the thrust axis (`-f_z`).
    pub fn vertical_accel(&self) -> f64 {
        -self.specific_force.z
    }

    pub fn is_finite(&self) -> bool {
        self.specific_force.iter().all(|x| x.is_finite())
            && self.rates.iter().all(|x| x.is_finite())
            && self.position.iter().all(|x| x.is_finite())
            && self.velocity.iter().all(|x| x.is_finite())
            && self.attitude.coords.iter().all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone)]
pub struct Sensor {
    noise: SensorNoise,
    rng: ChaCha8Rng,
    filter: LowPass2,
}

impl Sensor {
    pub fn new(noise: SensorNoise, seed: u64, dt: f64) -> Self {
        Self {
            noise,
            rng: ChaCha8Rng::seed_from_u64(seed),
            filter: LowPass2::new(ACCEL_FILTER_HZ, 1.0 / dt),
        }
    }

    /// Re-initialises the acceleration filter on the next sample.
    pub fn reset_filter(&mut self) {
        self.filter.reset();
    }

    fn jitter(&mut self, std: f64) -> Vector3<f64> {
        if std == 0.0 {
            return Vector3::zeros();
        }
        let n = Normal::new(0.0, std).expect("finite standard deviation");
        Vector3::from_fn(|_, _| n.sample(&mut self.rng))
    }

    pub fn read(&mut self, state: &SimState, specific_force: Vector3<f64>) -> SensorReading {
        let f = specific_force + self.jitter(self.noise.accel_std_m_s2);
        let rates = state.rates + self.jitter(self.noise.gyro_std_rad_s);
        let position = state.position + self.jitter(self.noise.position_std_m);
        let velocity = state.velocity_world() + self.jitter(self.noise.velocity_std_m_s);
        let filtered = self.filter.update(-f.z);
        SensorReading {
            t: state.t,
            specific_force: f,
            rates,
            attitude: state.attitude,
            position,
            velocity,
            filtered_vertical_accel: filtered,
        }
    }
}
