//! Priority mixer.
//!
//! Normalised commands `O = (R, P, Y, T)` map to rotor commands `U = K O`.
//! When `U` leaves `[-1, 1]` the mixer gives up authority in the order yaw,
//! thrust, roll/pitch, scaling each channel by the largest factor in
//! `[0, 1]` that restores feasibility.

use serde::{Deserialize, Serialize};

/// Rows give the mixer outputs `u1..u4`, columns `(R, P, Y, T)`.
pub const MIX_MATRIX: [[f64; 4]; 4] = [
    [-1.0, 1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0, 1.0],
    [1.0, 1.0, -1.0, 1.0],
    [-1.0, -1.0, -1.0, 1.0],
];

/// Mixer output `u_k` driving airframe rotor `i` is `u[ROTOR_OF_OUTPUT^-1]`:
/// rotor 1 ← u1, rotor 2 ← u4, rotor 3 ← u2, rotor 4 ← u3.
pub const OUTPUT_FOR_ROTOR: [usize; 4] = [0, 3, 1, 2];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActuatorCommand {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub thrust: f64,
}

impl ActuatorCommand {
    pub fn new(roll: f64, pitch: f64, yaw: f64, thrust: f64) -> Self {
        Self {
            roll,
            pitch,
            yaw,
            thrust,
        }
    }

    fn as_array(&self) -> [f64; 4] {
        [self.roll, self.pitch, self.yaw, self.thrust]
    }
}

/// Which channel, if any, the mixer had to scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixStage {
    Unsaturated,
    Yaw,
    Thrust,
    RollPitch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixOutput {
    /// Mixer outputs `u1..u4` in matrix row order.
    pub outputs: [f64; 4],
    pub stage: MixStage,
    /// Scale applied to the channel named by `stage` (1 when unsaturated).
    pub alpha: f64,
}

impl MixOutput {
    /// Outputs re-ordered to airframe rotors 1..4.
    pub fn rotors(&self) -> [f64; 4] {
        OUTPUT_FOR_ROTOR.map(|k| self.outputs[k])
    }
}

pub fn apply_matrix(o: [f64; 4]) -> [f64; 4] {
    MIX_MATRIX.map(|row| row.iter().zip(o).map(|(k, x)| k * x).sum())
}

/// Largest `α ∈ [0, 1]` with `|base_i + α·dir_i| ≤ 1` for every row, if any.
pub fn largest_feasible_scale(base: [f64; 4], dir: [f64; 4]) -> Option<f64> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for (b, c) in base.into_iter().zip(dir) {
        if c == 0.0 {
            if b.abs() > 1.0 {
                return None;
            }
            continue;
        }
        let (a1, a2) = ((-1.0 - b) / c, (1.0 - b) / c);
        lo = lo.max(a1.min(a2));
        hi = hi.min(a1.max(a2));
    }
    (lo <= hi).then_some(hi)
}

fn saturates(u: &[f64; 4]) -> bool {
    u.iter().any(|x| x.abs() > 1.0)
}

fn channel(o: [f64; 4], keep: [bool; 4]) -> [f64; 4] {
    std::array::from_fn(|i| if keep[i] { o[i] } else { 0.0 })
}

fn finish(base: [f64; 4], dir: [f64; 4], alpha: f64, stage: MixStage) -> MixOutput {
    let outputs = std::array::from_fn(|i| (base[i] + alpha * dir[i]).clamp(-1.0, 1.0));
    MixOutput { outputs, stage, alpha }
}

pub fn mix(cmd: &ActuatorCommand) -> MixOutput {
    let o = cmd.as_array();
    let u = apply_matrix(o);
    if !saturates(&u) {
        return MixOutput {
            outputs: u,
            stage: MixStage::Unsaturated,
            alpha: 1.0,
        };
    }
    let rp = apply_matrix(channel(o, [true, true, false, false]));
    if cmd.yaw != 0.0 {
        let base = apply_matrix(channel(o, [true, true, false, true]));
        let dir = apply_matrix(channel(o, [false, false, true, false]));
        if let Some(a) = largest_feasible_scale(base, dir) {
            return finish(base, dir, a, MixStage::Yaw);
        }
    }
    if cmd.thrust != 0.0 {
        let dir = apply_matrix(channel(o, [false, false, false, true]));
        if let Some(a) = largest_feasible_scale(rp, dir) {
            return finish(rp, dir, a, MixStage::Thrust);
        }
    }
    let a = largest_feasible_scale([0.0; 4], rp).expect("zero command is feasible");
    finish([0.0; 4], rp, a, MixStage::RollPitch)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_in_zero_out() {
        let m = mix(&ActuatorCommand::default());
        assert_eq!(m.outputs, [0.0; 4]);
        assert_eq!(m.stage, MixStage::Unsaturated);
    }

    #[test]
    fn hand_multiplied_example() {
        let m = mix(&ActuatorCommand::new(0.1, 0.1, 0.1, 0.1));
        let expect = [0.2, 0.2, 0.2, -0.2];
        for (a, b) in m.outputs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(m.stage, MixStage::Unsaturated);
    }

    #[test]
    fn yaw_is_scaled_first() {
        let m = mix(&ActuatorCommand::new(0.5, 0.5, 0.8, 0.5));
        assert_eq!(m.stage, MixStage::Yaw);
        assert!((m.alpha - 0.625).abs() < 1e-12);
        assert!(m.outputs.iter().all(|x| x.abs() <= 1.0));
    }

    #[test]
    fn full_thrust_keeps_attitude_authority() {
        let m = mix(&ActuatorCommand::new(0.1, -0.05, 0.0, 1.0));
        assert_eq!(m.stage, MixStage::Thrust);
        // roll and pitch survive intact
        let u = m.outputs;
        assert!(((-u[0] + u[1] + u[2] - u[3]) / 4.0 - 0.1).abs() < 1e-12);
        assert!(((u[0] - u[1] + u[2] - u[3]) / 4.0 + 0.05).abs() < 1e-12);
        assert!((m.alpha - 0.85).abs() < 1e-12);
    }

    #[test]
    fn roll_pitch_scaled_last() {
        let m = mix(&ActuatorCommand::new(1.0, 1.0, 0.5, 0.5));
        assert_eq!(m.stage, MixStage::RollPitch);
        assert!((m.alpha - 0.5).abs() < 1e-15);
        assert_eq!(m.outputs, [0.0, 0.0, 1.0, -1.0]);
    }

    #[test]
    fn rotor_order() {
        let m = mix(&ActuatorCommand::new(0.0, 0.0, 0.0, 0.3));
        assert_eq!(m.rotors(), [0.3; 4]);
        let r = mix(&ActuatorCommand::new(0.1, 0.0, 0.0, 0.0)).rotors();
        // positive roll loads the left rotors 3 and 4
        assert_eq!(r, [-0.1, -0.1, 0.1, 0.1]);
    }
}
