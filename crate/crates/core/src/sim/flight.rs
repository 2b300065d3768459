//! Flight computer: mode logic, guidance, control, mixing and servo leads.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::actuation::{mix, ActuatorCommand, CommandScale, MixStage, ServoModel, ThrustCurve};
use crate::control::{AttitudeController, ControlGains, PositionController, SensorReading, VerticalAccelController};
use crate::dynamics::state::dcm;
use crate::env::{gravity, Atmosphere, VehicleParams};
use crate::safety::{
    Estimate, FaultConfig, FaultFlag, FaultMonitor, Geofence, MissionConfig, MissionStateMachine, Mode, SafetyVerdict,
};
use crate::sizing::thrust_lapse;

/// Fraction of the full braking deceleration at which an abort recovery
/// starts to brake instead of coasting.
const RECOVERY_BRAKE_FRACTION: f64 = 0.8;
/// Climb rate above which an abort coasts up to its apex first, m/s.
const RECOVERY_COAST_CLIMB: f64 = 0.5;
/// Pre-spin thrust during the countdown, as a fraction of weight.
const COUNTDOWN_THRUST_FRACTION: f64 = 0.95;

enum Recovery {
    Coast,
    Thrust(f64),
    Hold,
}

/// Everything the flight computer sends out in one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightOutput {
    pub mode: Mode,
    pub servo_commands: [f64; 4],
    pub deflection_targets: [f64; 4],
    pub command: ActuatorCommand,
    pub mix_stage: MixStage,
    pub power_cut: bool,
    pub brake_drag: bool,
}

#[derive(Debug, Clone)]
pub struct FlightComputer {
    params: VehicleParams,
    atmosphere: Atmosphere,
    curve: ThrustCurve,
    scale: CommandScale,
    rotor_full_thrust: f64,
    attitude: AttitudeController,
    vertical: VerticalAccelController,
    position: PositionController,
    mission: MissionStateMachine,
    monitor: FaultMonitor,
    geofence: Geofence,
    home: Vector3<f64>,
    heading: f64,
    braking: bool,
    holding: bool,
    last_mode: Mode,
    last_commands: [f64; 4],
    last_verdict: Option<SafetyVerdict>,
    dt: f64,
}

impl FlightComputer {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        params: VehicleParams,
        atmosphere: Atmosphere,
        curve: ThrustCurve,
        servo: ServoModel,
        gains: &ControlGains,
        mission: MissionConfig,
        fault: FaultConfig,
        geofence: Geofence,
        home: Vector3<f64>,
        dt: f64,
    ) -> Self {
        let rotor_full_thrust = curve.max_thrust();
        Self {
            scale: CommandScale::new(&params, rotor_full_thrust),
            rotor_full_thrust,
            params,
            atmosphere,
            curve,
            attitude: AttitudeController::new(&gains.attitude),
            vertical: VerticalAccelController::new(gains.vertical, dt),
            position: PositionController::new(gains.position),
            mission: MissionStateMachine::new(mission),
            monitor: FaultMonitor::new(fault, servo),
            geofence,
            home,
            heading: 0.0,
            braking: false,
            holding: false,
            last_mode: Mode::Manual,
            last_commands: [0.0; 4],
            last_verdict: None,
            dt,
        }
    }

    pub fn mission(&self) -> &MissionStateMachine {
        &self.mission
    }

    pub fn monitor(&self) -> &FaultMonitor {
        &self.monitor
    }

    pub fn geofence(&self) -> &Geofence {
        &self.geofence
    }

    pub fn last_verdict(&self) -> Option<SafetyVerdict> {
        self.last_verdict
    }

    pub fn arm(&mut self, t: f64, heading: f64) -> bool {
        self.heading = heading;
        self.mission.arm(t)
    }

    fn lapse(&self, altitude: f64, v_axial: f64) -> f64 {
        thrust_lapse(&self.params, &self.atmosphere, altitude.max(0.0), v_axial).expect("lapse converges")
    }

    /// Thrust (N) needed to cancel the body-z drag one step ahead, assuming
    /// the vehicle coasts ballistically until then.
    fn drag_feedforward(&self, r: &SensorReading) -> (f64, f64) {
        let h = self.dt;
        let v = r.velocity;
        let rho = self.atmosphere.density(r.position.z);
        let k = 0.5 * rho * self.params.planform_area() * self.params.drag_coeff();
        let a = Vector3::new(0.0, 0.0, -gravity()) - k * v.norm() * v / self.params.mass();
        let vp = v + a * h;
        let zp = r.position.z + v.z * h + 0.5 * a.z * h * h;
        let ned = Vector3::new(vp.x, -vp.y, -vp.z);
        let body = dcm(&r.attitude).transpose() * ned;
        let kp = 0.5 * self.atmosphere.density(zp) * self.params.planform_area() * self.params.drag_coeff();
        let drag_z = -kp * body.norm() * body.z;
        (drag_z, self.lapse(zp, -body.z))
    }

    /// Body-z drag at the current reading with drag coefficient `cd`.
    fn drag_now(&self, r: &SensorReading, cd: f64) -> f64 {
        let v = r.velocity;
        let body = dcm(&r.attitude).transpose() * Vector3::new(v.x, -v.y, -v.z);
        -0.5 * self.atmosphere.density(r.position.z) * self.params.planform_area() * cd * body.norm() * body.z
    }

    /// Descent guidance towards the park altitude. `latch` starts braking
    /// immediately instead of coasting until the required deceleration
    /// approaches the available one.
    fn recovery(&mut self, r: &SensorReading, cd: f64, full: f64, latch: bool) -> Recovery {
        let cfg = self.mission.config();
        let (park, band, stop) = (cfg.park_altitude_m, cfg.stop_band_m, cfg.stop_speed_m_s);
        let climb = r.velocity.z;
        let gap = r.position.z - park;
        if self.holding || gap <= band || (self.braking && climb >= -stop) {
            if !self.holding {
                self.holding = true;
                self.position.reset();
            }
            return Recovery::Hold;
        }
        if climb >= 0.0 {
            return Recovery::Coast;
        }
        let m = self.params.mass();
        let drag_up = -self.drag_now(r, cd).min(0.0);
        let a_full = (full + drag_up) / m - gravity();
        let a_req = climb * climb / (2.0 * gap);
        if !latch && !self.braking && a_req < RECOVERY_BRAKE_FRACTION * a_full {
            return Recovery::Coast;
        }
        self.braking = true;
        Recovery::Thrust((m * (gravity() + a_req) - drag_up).clamp(0.0, full))
    }

    /// One control cycle on the reading taken at `reading.t`.
    pub fn update(&mut self, reading: &SensorReading) -> FlightOutput {
        let t = reading.t;
        let dt = self.dt;
        let m = self.params.mass();
        let estimate = reading.is_finite().then_some(Estimate {
            t,
            position: reading.position,
            climb_rate: reading.velocity.z,
        });
        let verdict = estimate.map(|e| self.geofence.check(&e.position));
        self.last_verdict = verdict;
        let mode = self
            .mission
            .update(t, estimate.as_ref(), verdict.as_ref(), self.monitor.flag());
        if mode != self.last_mode {
            self.enter(mode, t);
        }
        self.last_mode = mode;

        if self.mission.power_cut() {
            return self.output(mode, ActuatorCommand::default(), MixStage::Unsaturated, [0.0; 4], true, false);
        }

        let v_axial = -(dcm(&reading.attitude).transpose() * {
            let v = reading.velocity;
            Vector3::new(v.x, -v.y, -v.z)
        })
        .z;
        let lapse = self.lapse(reading.position.z, v_axial);
        let full = 4.0 * self.rotor_full_thrust * lapse;
        let park = Vector3::new(self.home.x, self.home.y, self.mission.config().park_altitude_m);
        let mut brake_drag = false;

        // thrust in newtons (None = normalised command), lateral tilt setpoints
        let (thrust_n, thrust_norm, tilt) = match mode {
            Mode::Manual => (Some(0.0), None, (0.0, 0.0)),
            Mode::Countdown => (Some(COUNTDOWN_THRUST_FRACTION * self.params.weight()), None, (0.0, 0.0)),
            Mode::Ascent => (None, Some(1.0), self.position.lateral(&self.home, reading, dt)),
            Mode::Microgravity => {
                let (drag_z, lapse_pred) = self.drag_feedforward(reading);
                let corr = self.vertical.update(reading, dt);
                let tilt = self.position.lateral(&self.home, reading, dt);
                let norm = (drag_z + m * corr) / (4.0 * self.rotor_full_thrust * lapse_pred);
                (None, Some(norm), tilt)
            }
            Mode::Brake | Mode::Abort => {
                let cd = if mode == Mode::Brake {
                    brake_drag = true;
                    self.params.drag_coeff_brake()
                } else {
                    self.params.drag_coeff()
                };
                let coast_up = mode == Mode::Abort && !self.braking && reading.velocity.z > RECOVERY_COAST_CLIMB;
                let plan = if coast_up {
                    Recovery::Coast
                } else {
                    self.recovery(reading, cd, full, mode == Mode::Brake)
                };
                match plan {
                    Recovery::Hold => {
                        let o = self.position.update(&park, reading, m, dt);
                        (Some(o.thrust), None, (o.roll, o.pitch))
                    }
                    Recovery::Coast => (Some(0.0), None, self.position.lateral(&self.home, reading, dt)),
                    Recovery::Thrust(t) => (Some(t), None, self.position.lateral(&self.home, reading, dt)),
                }
            }
            Mode::Stabilize => {
                let o = self.position.update(&park, reading, m, dt);
                (Some(o.thrust), None, (o.roll, o.pitch))
            }
        };

        let norm = thrust_norm.unwrap_or_else(|| thrust_n.unwrap_or(0.0) / full);
        let [ixx, iyy, izz] = self.params.inertia();
        let authority = [
            self.scale.roll * lapse / ixx,
            self.scale.pitch * lapse / iyy,
            self.scale.yaw / izz,
        ];
        let [roll, pitch, yaw] = self.attitude.update((tilt.0, tilt.1, self.heading), reading, authority, dt);
        let cmd = ActuatorCommand::new(roll, pitch, yaw, norm);
        let mixed = mix(&cmd);
        let targets = mixed.rotors().map(|u| self.curve.deflection(u * self.rotor_full_thrust).value);
        self.output(mode, cmd, mixed.stage, targets, false, brake_drag)
    }

    fn output(
        &mut self,
        mode: Mode,
        command: ActuatorCommand,
        mix_stage: MixStage,
        targets: [f64; 4],
        power_cut: bool,
        brake_drag: bool,
    ) -> FlightOutput {
        let servo_commands = std::array::from_fn(|i| {
            if power_cut {
                0.0
            } else {
                self.monitor.replica(i).lead_command(targets[i], self.dt)
            }
        });
        self.last_commands = servo_commands;
        FlightOutput {
            mode,
            servo_commands,
            deflection_targets: targets,
            command,
            mix_stage,
            power_cut,
            brake_drag,
        }
    }

    /// Feeds back the measured blade angles after the step that ended at `t`.
    pub fn observe_servos(&mut self, t: f64, measured: [f64; 4]) -> Option<FaultFlag> {
        self.monitor.update(t, self.last_commands, measured, self.dt)
    }

    fn enter(&mut self, mode: Mode, t: f64) {
        match mode {
            Mode::Microgravity => self.vertical.enter(t),
            Mode::Brake | Mode::Abort => {
                self.braking = false;
                self.holding = false;
            }
            _ => {}
        }
    }
}
