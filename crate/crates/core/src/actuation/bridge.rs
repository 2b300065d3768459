//! Conversion between physical loads and normalised mixer commands.
//!
//! After static inversion each rotor behaves as a linear effector whose unit
//! command produces its full-scale thrust `F`. With four rotors and the
//! mixer's ±1 layout, unit channel commands correspond to
//! `T = 4F`, `L = 4F·L_Y`, `M = 4F·L_X` and `N = 4·K_D·δ_max`.

use serde::{Deserialize, Serialize};

use super::mixer::ActuatorCommand;
use crate::env::VehicleParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommandScale {
    pub thrust: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl CommandScale {
    /// `rotor_full_thrust` is the thrust of one rotor at full deflection.
    pub fn new(params: &VehicleParams, rotor_full_thrust: f64) -> Self {
        let f4 = 4.0 * rotor_full_thrust;
        Self {
            thrust: f4,
            roll: f4 * params.arm_y(),
            pitch: f4 * params.arm_x(),
            yaw: 4.0 * params.dragtorque_gain() * params.max_blade_deflection(),
        }
    }

    pub fn normalize(&self, thrust: f64, roll: f64, pitch: f64, yaw: f64) -> ActuatorCommand {
        ActuatorCommand::new(roll / self.roll, pitch / self.pitch, yaw / self.yaw, thrust / self.thrust)
    }

    pub fn physical(&self, cmd: &ActuatorCommand) -> (f64, f64, f64, f64) {
        (
            cmd.thrust * self.thrust,
            cmd.roll * self.roll,
            cmd.pitch * self.pitch,
            cmd.yaw * self.yaw,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actuation::{mix, Allocator};
    use crate::presets;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unsaturated_mix_agrees_with_allocation() {
        // a linear effector of full-scale thrust F has gain F/δ per radian
        let p = presets::nominal();
        let full = 25.0;
        let delta = p.max_blade_deflection();
        let scale = CommandScale::new(&p, full);
        let alloc = Allocator::with_gains(full / delta, p.dragtorque_gain(), p.arm_x(), p.arm_y()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let cmd = ActuatorCommand::new(
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.3..0.3),
            );
            let (t, l, m, n) = scale.physical(&cmd);
            let alpha = alloc.allocate(t, l, m, n);
            let rotors = mix(&cmd).rotors();
            for (a, u) in alpha.iter().zip(rotors) {
                assert!((a - delta * u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalize_inverts_physical() {
        let p = presets::nominal();
        let s = CommandScale::new(&p, 20.0);
        let c = ActuatorCommand::new(0.1, -0.2, 0.3, 0.4);
        let (t, l, m, n) = s.physical(&c);
        let back = s.normalize(t, l, m, n);
        assert!((back.roll - c.roll).abs() < 1e-15 && (back.thrust - c.thrust).abs() < 1e-15);
        assert!((back.pitch - c.pitch).abs() < 1e-15 && (back.yaw - c.yaw).abs() < 1e-15);
    }
}
