//! Discrete PID: trapezoidal integral, filtered derivative on measurement,
//! conditional-integration anti-windup.

use serde::{Deserialize, Serialize};

/// Derivative filter time constant in units of the update period.
const DERIVATIVE_TAU_STEPS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Symmetric output bound.
    pub output_limit: f64,
    /// Symmetric bound on the integral contribution `K_i ∫e`.
    pub integrator_limit: f64,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64, output_limit: f64, integrator_limit: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            output_limit,
            integrator_limit,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(format!("{name} must be non-negative"));
            }
        }
        if !(self.output_limit > 0.0) || !(self.integrator_limit > 0.0) {
            return Err("limits must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PidState {
    pub integrator: f64,
    pub prev_error: f64,
    pub prev_measurement: Option<f64>,
    pub derivative: f64,
    pub output: f64,
}

impl PidState {
    pub fn reset(&mut self) {
        *self = Self::default();
    }
}

pub fn pid_update(gains: &PidGains, state: &mut PidState, setpoint: f64, measurement: f64, dt: f64) -> f64 {
    pid_update_error(gains, state, setpoint - measurement, measurement, dt)
}

/// As [`pid_update`] with the error supplied directly (for wrapped angles).
pub fn pid_update_error(gains: &PidGains, state: &mut PidState, error: f64, measurement: f64, dt: f64) -> f64 {
    let raw_d = match state.prev_measurement {
        Some(prev) => -(measurement - prev) / dt,
        None => 0.0,
    };
    state.derivative += (raw_d - state.derivative) / (DERIVATIVE_TAU_STEPS + 1.0);

    let lim = gains.output_limit;
    let ilim = gains.integrator_limit;
    let increment = gains.ki * 0.5 * (error + state.prev_error) * dt;
    let trial = (state.integrator + increment).clamp(-ilim, ilim);
    let pd = gains.kp * error + gains.kd * state.derivative;
    let unclamped = pd + trial;
    let pushes_further = (unclamped > lim && increment > 0.0) || (unclamped < -lim && increment < 0.0);
    if !pushes_further {
        state.integrator = trial;
    }
    let out = (pd + state.integrator).clamp(-lim, lim);
    state.prev_error = error;
    state.prev_measurement = Some(measurement);
    state.output = out;
    out
}

/// Gains plus state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pid {
    pub gains: PidGains,
    pub state: PidState,
}

impl Pid {
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            state: PidState::default(),
        }
    }

    pub fn update(&mut self, setpoint: f64, measurement: f64, dt: f64) -> f64 {
        pid_update(&self.gains, &mut self.state, setpoint, measurement, dt)
    }

    pub fn update_error(&mut self, error: f64, measurement: f64, dt: f64) -> f64 {
        pid_update_error(&self.gains, &mut self.state, error, measurement, dt)
    }

    pub fn reset(&mut self) {
        self.state.reset();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportional_only() {
        let g = PidGains::new(2.0, 0.0, 0.0, 10.0, 10.0);
        let mut s = PidState::default();
        assert_eq!(pid_update(&g, &mut s, 0.5, 0.0, 0.01), 1.0);
    }

    #[test]
    fn trapezoid_of_constant_error() {
        let g = PidGains::new(0.0, 1.0, 0.0, 10.0, 10.0);
        let mut s = PidState::default();
        let mut out = 0.0;
        for _ in 0..10 {
            out = pid_update(&g, &mut s, 1.0, 0.0, 0.1);
        }
        assert!((out - 0.95).abs() < 1e-12, "{out}");
    }

    #[test]
    fn clamp_freezes_integrator() {
        let g = PidGains::new(1.0, 1.0, 0.0, 0.3, 10.0);
        let mut s = PidState::default();
        assert_eq!(pid_update(&g, &mut s, 1.0, 0.0, 0.1), 0.3);
        let frozen = s.integrator;
        for _ in 0..50 {
            assert_eq!(pid_update(&g, &mut s, 1.0, 0.0, 0.1), 0.3);
        }
        assert_eq!(s.integrator, frozen);
        // unwinding is allowed immediately
        pid_update(&g, &mut s, -1.0, 0.0, 0.1);
        assert!(s.integrator <= frozen);
    }

    #[test]
    fn zero_gains_give_zero() {
        let g = PidGains::new(0.0, 0.0, 0.0, 1.0, 1.0);
        let mut s = PidState::default();
        for k in 0..20 {
            assert_eq!(pid_update(&g, &mut s, k as f64, -(k as f64), 0.004), 0.0);
        }
    }

    #[test]
    fn derivative_on_measurement_has_no_kick() {
        let g = PidGains::new(0.0, 0.0, 1.0, 100.0, 1.0);
        let mut s = PidState::default();
        pid_update(&g, &mut s, 0.0, 0.0, 0.01);
        assert_eq!(pid_update(&g, &mut s, 5.0, 0.0, 0.01), 0.0);
        // a measurement ramp gives -slope after the filter settles
        let mut out = 0.0;
        for k in 1..200 {
            out = pid_update(&g, &mut s, 5.0, 0.01 * k as f64, 0.01);
        }
        assert!((out + 1.0).abs() < 1e-9);
    }
}
