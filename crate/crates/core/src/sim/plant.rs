//! Truth model: rigid body, four blade servos, thrust curve and lapse,
//! ground contact.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::actuation::{ServoModel, ThrustCurve};
use crate::dynamics::{self, compose_forces, BodyForcesMoments, DivergenceError, SimState, ROTOR_SPIN};
use crate::env::{Atmosphere, VehicleParams};
use crate::sizing::thrust_lapse;

/// A servo that stops following its command from `t` on and holds
/// `position`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoFailure {
    pub servo: usize,
    pub t: f64,
    pub position_rad: f64,
}

#[derive(Debug, Clone)]
pub struct Plant {
    params: VehicleParams,
    atmosphere: Atmosphere,
    curve: ThrustCurve,
    servos: [ServoModel; 4],
    failure: Option<ServoFailure>,
    pub state: SimState,
    power_cut: bool,
    brake_drag: bool,
    touchdown_speed: Option<f64>,
}

/// Rotor loads at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorLoads {
    pub thrusts: [f64; 4],
    pub torques: [f64; 4],
}

impl Plant {
    pub fn new(
        params: VehicleParams,
        atmosphere: Atmosphere,
        curve: ThrustCurve,
        servo: ServoModel,
        initial: SimState,
    ) -> Self {
        Self {
            params,
            atmosphere,
            curve,
            servos: [servo; 4],
            failure: None,
            state: initial,
            power_cut: false,
            brake_drag: false,
            touchdown_speed: None,
        }
    }

    pub fn params(&self) -> &VehicleParams {
        &self.params
    }

    pub fn set_failure(&mut self, failure: Option<ServoFailure>) {
        self.failure = failure;
    }

    pub fn cut_power(&mut self) {
        self.power_cut = true;
    }

    pub fn power_cut(&self) -> bool {
        self.power_cut
    }

    /// Selects the braking drag coefficient (air-brake deployed).
    pub fn set_brake_drag(&mut self, deployed: bool) {
        self.brake_drag = deployed;
    }

    pub fn drag_coeff(&self) -> f64 {
        if self.brake_drag {
            self.params.drag_coeff_brake()
        } else {
            self.params.drag_coeff()
        }
    }

    /// Speed at the most recent ground contact from flight, m/s.
    pub fn touchdown_speed(&self) -> Option<f64> {
        self.touchdown_speed
    }

    /// Sets every blade angle directly, for starting from a trimmed state.
    pub fn trim_servos(&mut self, deflection: f64) {
        for s in &mut self.servos {
            s.set_output(deflection);
        }
    }

    pub fn deflections(&self) -> [f64; 4] {
        self.servos.map(|s| s.output())
    }

    fn failed(&self, i: usize, t: f64) -> Option<f64> {
        self.failure
            .filter(|f| f.servo == i && t >= f.t - 1e-12)
            .map(|f| f.position_rad)
    }

    /// Rotor thrust and yaw reaction for the given deflections and state.
    pub fn rotor_loads(&self, state: &SimState, deflections: [f64; 4]) -> RotorLoads {
        if self.power_cut {
            return RotorLoads {
                thrusts: [0.0; 4],
                torques: [0.0; 4],
            };
        }
        // axial inflow is the climb component along the thrust axis
        let v_axial = -state.velocity.z;
        let lapse = thrust_lapse(&self.params, &self.atmosphere, state.altitude().max(0.0), v_axial)
            .expect("lapse converges for finite states");
        let kd = self.params.dragtorque_gain();
        RotorLoads {
            thrusts: deflections.map(|a| self.curve.thrust(a).value * lapse),
            torques: std::array::from_fn(|i| ROTOR_SPIN[i] * kd * deflections[i]),
        }
    }

    pub fn loads(&self, state: &SimState, deflections: [f64; 4], wind_ned: Vector3<f64>) -> BodyForcesMoments {
        let r = self.rotor_loads(state, deflections);
        compose_forces(
            state,
            &self.params,
            &self.atmosphere,
            r.thrusts,
            r.torques,
            self.drag_coeff(),
            wind_ned,
        )
    }

    /// Body specific force in m/s² at the current state and deflections.
    pub fn specific_force(&self, wind_ned: Vector3<f64>) -> Vector3<f64> {
        self.loads(&self.state, self.deflections(), wind_ned)
            .specific_force(self.params.mass())
    }

    /// Advances one step. Servo commands are held over the step and the
    /// blade angles follow their exact lag trajectory inside it.
    pub fn step(&mut self, commands: [f64; 4], wind_ned: Vector3<f64>, dt: f64) -> Result<(), DivergenceError> {
        let t0 = self.state.t;
        let start = self.servos;
        let mut targets = [0.0; 4];
        let mut frozen = [None; 4];
        for i in 0..4 {
            frozen[i] = self.failed(i, t0);
            targets[i] = start[i].effective_command(commands[i]);
        }
        let tau = start.map(|s| s.tau());
        let angle_at = |t: f64| -> [f64; 4] {
            let s = (t - t0).max(0.0);
            std::array::from_fn(|i| match frozen[i] {
                Some(p) => p,
                None => {
                    let y = start[i].output();
                    let m = start[i].max_deflection();
                    (y - (targets[i] - y) * (-s / tau[i]).exp_m1()).clamp(-m, m)
                }
            })
        };
        let out = dynamics::step(
            &self.state,
            &self.params,
            |s: &SimState| self.loads(s, angle_at(s.t), wind_ned),
            dt,
        )?;
        for i in 0..4 {
            match frozen[i] {
                Some(p) => self.servos[i].set_output(p),
                None => {
                    self.servos[i].step(commands[i], dt);
                }
            }
        }
        let airborne = self.state.position.z > 0.0;
        self.state = out.state;
        if self.state.position.z < 0.0 {
            // rigid ground: stop on contact, keep the attitude
            let speed = self.state.velocity.norm();
            if airborne && speed > 0.0 {
                self.touchdown_speed = Some(speed);
            }
            self.state.position.z = 0.0;
            self.state.velocity = Vector3::zeros();
            self.state.rates = Vector3::zeros();
        }
        Ok(())
    }
}
