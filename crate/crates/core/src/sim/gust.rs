//! Discrete `1 - cos` lateral gust.

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gust {
    pub start_s: f64,
    pub duration_s: f64,
    pub amplitude_m_s: f64,
    /// Direction the air moves towards, radians from north towards west.
    pub heading_rad: f64,
}

impl Gust {
    /// Draws the onset time uniformly in `window` and the direction uniformly.
    pub fn random<R: Rng>(rng: &mut R, window: (f64, f64), duration_s: f64, amplitude_m_s: f64) -> Self {
        Self {
            start_s: rng.random_range(window.0..=window.1),
            duration_s,
            amplitude_m_s,
            heading_rad: rng.random_range(0.0..std::f64::consts::TAU),
        }
    }

    /// Gust speed at time `t`.
    pub fn speed(&self, t: f64) -> f64 {
        let s = t - self.start_s;
        if s <= 0.0 || s >= self.duration_s {
            return 0.0;
        }
        0.5 * self.amplitude_m_s * (1.0 - (std::f64::consts::TAU * s / self.duration_s).cos())
    }

    /// Air-mass velocity in NED axes.
    pub fn wind_ned(&self, t: f64) -> Vector3<f64> {
        let v = self.speed(t);
        let (s, c) = self.heading_rad.sin_cos();
        // world west is NED -east
        Vector3::new(v * c, -v * s, 0.0)
    }
}
