//! First-order servo with backlash dead-band.

use serde::{Deserialize, Serialize};

use super::ActuatorError;

/// Identified servo time constant, s.
pub const SERVO_TAU: f64 = 0.075;

/// Dead-band as a fraction of full deflection: 5 µs of a ±500 µs PWM span.
pub const DEAD_BAND_FRACTION: f64 = 5.0 / 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoModel {
    tau: f64,
    dead_band: f64,
    max_deflection: f64,
    output: f64,
}

impl ServoModel {
    pub fn new(tau: f64, dead_band: f64, max_deflection: f64) -> Result<Self, ActuatorError> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(ActuatorError::Config("servo time constant must be positive".into()));
        }
        if !(dead_band >= 0.0 && dead_band.is_finite()) {
            return Err(ActuatorError::Config("servo dead-band must be non-negative".into()));
        }
        if !(max_deflection > 0.0 && max_deflection.is_finite()) {
            return Err(ActuatorError::Config("servo travel must be positive".into()));
        }
        Ok(Self {
            tau,
            dead_band,
            max_deflection,
            output: 0.0,
        })
    }

    /// τ = 0.075 s with the default dead-band for this travel.
    pub fn identified(max_deflection: f64) -> Self {
        Self::new(SERVO_TAU, DEAD_BAND_FRACTION * max_deflection, max_deflection).expect("identified servo is valid")
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn dead_band(&self) -> f64 {
        self.dead_band
    }

    pub fn max_deflection(&self) -> f64 {
        self.max_deflection
    }

    pub fn output(&self) -> f64 {
        self.output
    }

    pub fn set_output(&mut self, y: f64) {
        self.output = y.clamp(-self.max_deflection, self.max_deflection);
    }

    /// The command the lag actually tracks: commands inside the dead-band
    /// hold the current output, larger ones lose the backlash width.
    pub fn effective_command(&self, command: f64) -> f64 {
        let e = command - self.output;
        if e.abs() <= self.dead_band {
            self.output
        } else {
            command - self.dead_band * e.signum()
        }
    }

    /// Advances by `dt` under a held command (exact zero-order-hold
    /// discretisation of `1/(τs+1)`).
    pub fn step(&mut self, command: f64, dt: f64) -> f64 {
        let target = self.effective_command(command);
        let a = -(-dt / self.tau).exp_m1();
        let y = self.output + a * (target - self.output);
        self.set_output(y);
        self.output
    }

    /// Command that moves the output to `target` in one step of `dt`, within
    /// the command range `±(max + dead-band)`.
    pub fn lead_command(&self, target: f64, dt: f64) -> f64 {
        let target = target.clamp(-self.max_deflection, self.max_deflection);
        let e = target - self.output;
        if e == 0.0 {
            return self.output;
        }
        let a = -(-dt / self.tau).exp_m1();
        let limit = self.max_deflection + self.dead_band;
        (self.output + e / a + self.dead_band * e.signum()).clamp(-limit, limit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rustfft::{num_complex::Complex, FftPlanner};

    fn linear() -> ServoModel {
        ServoModel::new(SERVO_TAU, 0.0, 0.09).unwrap()
    }

    #[test]
    fn step_at_tau() {
        let mut s = linear();
        for _ in 0..18 {
            s.step(0.09, 0.004);
        }
        // 18 · 4 ms + 3 ms = τ
        let y = s.step(0.09, 0.003);
        assert!((y - 0.056_890_850_294_570_19).abs() < 1e-12, "{y}");
        assert!((y - 0.09 * (1.0 - (-1.0f64).exp())).abs() < 1e-6);
    }

    #[test]
    fn default_dead_band_value() {
        let s = ServoModel::identified(0.09);
        assert!((s.dead_band() - 0.0009).abs() < 1e-15);
        assert_eq!(s.tau(), 0.075);
    }

    #[test]
    fn sub_threshold_command_is_ignored() {
        let mut s = ServoModel::identified(0.09);
        s.set_output(0.02);
        for _ in 0..100 {
            assert_eq!(s.step(0.02 + 0.0009, 0.004), 0.02);
            assert_eq!(s.step(0.02 - 0.0005, 0.004), 0.02);
        }
    }

    #[test]
    fn settles_one_dead_band_short() {
        let mut s = ServoModel::identified(0.09);
        for _ in 0..2000 {
            s.step(0.05, 0.004);
        }
        assert!((s.output() - (0.05 - 0.0009)).abs() < 1e-12);
    }

    #[test]
    fn output_is_clamped() {
        let mut s = linear();
        for _ in 0..5000 {
            s.step(1.0, 0.004);
        }
        assert_eq!(s.output(), 0.09);
    }

    #[test]
    fn lead_command_is_deadbeat() {
        let mut s = ServoModel::identified(0.09);
        s.set_output(0.03);
        for target in [0.0301, 0.031, 0.0299, 0.03, -0.01] {
            let c = s.lead_command(target, 0.004);
            let y = s.step(c, 0.004);
            if c.abs() < 0.09 + 0.0009 {
                assert!((y - target).abs() < 1e-15, "{y} vs {target}");
            }
        }
    }

    #[test]
    fn lead_command_can_reach_full_travel() {
        let mut s = ServoModel::identified(0.09);
        for _ in 0..3000 {
            let c = s.lead_command(0.09, 0.004);
            s.step(c, 0.004);
        }
        assert!((s.output() - 0.09).abs() < 1e-12);
    }

    #[test]
    fn corner_frequency_is_minus_three_db() {
        // linear chirp 0.5–8 Hz, gain read from the FFT ratio at 1/(2πτ)
        let dt = 0.001;
        let n = 1 << 16;
        let dur = n as f64 * dt;
        let (f0, f1) = (0.5, 8.0);
        let k = (f1 - f0) / dur;
        let mut s = linear();
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 * dt;
            let u = 0.04 * (2.0 * std::f64::consts::PI * (f0 * t + 0.5 * k * t * t)).sin();
            x.push(Complex::new(u, 0.0));
            y.push(Complex::new(s.output(), 0.0));
            s.step(u, dt);
        }
        let fft = FftPlanner::new().plan_fft_forward(n);
        fft.process(&mut x);
        fft.process(&mut y);
        let fc = 1.0 / (2.0 * std::f64::consts::PI * SERVO_TAU);
        let bin = (fc * dur).round() as usize;
        // average a few bins to tame the chirp's spectral ripple
        let gain = |b: usize| {
            let (mut num, mut den) = (0.0, 0.0);
            for j in b - 3..=b + 3 {
                num += y[j].norm_sqr();
                den += x[j].norm_sqr();
            }
            (num / den).sqrt()
        };
        let db = 20.0 * gain(bin).log10();
        assert!((db + 3.0103).abs() < 0.5, "{db} dB");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ServoModel::new(0.0, 0.0, 0.09).is_err());
        assert!(ServoModel::new(0.1, -1.0, 0.09).is_err());
        assert!(ServoModel::new(0.1, 0.0, 0.0).is_err());
    }
}
