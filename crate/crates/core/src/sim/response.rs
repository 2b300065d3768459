//! Attitude step response in hover, for loop tuning.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::plant::Plant;
use crate::actuation::{mix, ActuatorCommand, CommandScale};
use crate::config::Setup;
use crate::control::{AttitudeController, Sensor};
use crate::dynamics::{DivergenceError, SimState};
use crate::sizing::thrust_lapse;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResponse {
    pub step_rad: f64,
    /// 10 % to 90 % rise time, s.
    pub rise_time_s: f64,
    /// Peak overshoot as a fraction of the step.
    pub overshoot: f64,
    /// Mean absolute error over the last half second, rad.
    pub steady_state_error_rad: f64,
    pub t: Vec<f64>,
    pub roll: Vec<f64>,
}

/// Hovers level at `altitude`, then steps the roll setpoint by `step_rad`
/// and records the roll angle for `duration_s`.
pub fn roll_step(setup: &Setup, step_rad: f64, duration_s: f64) -> Result<StepResponse, DivergenceError> {
    let dt = setup.options.dt_s;
    let p = &setup.params;
    let atm = setup.atmosphere;
    let altitude = 20.0;
    let mut plant = Plant::new(
        p.clone(),
        atm,
        setup.curve.clone(),
        setup.servo,
        SimState::at_rest(Vector3::new(0.0, 0.0, altitude)),
    );
    let f = setup.curve.max_thrust();
    let scale = CommandScale::new(p, f);
    let lapse = thrust_lapse(p, &atm, altitude, 0.0).expect("static lapse");
    let hover = p.weight() / (4.0 * f * lapse);
    // start from the trimmed hover deflection
    plant.trim_servos(setup.curve.deflection(hover * f).value);
    let mut att = AttitudeController::new(&setup.gains.attitude);
    let mut sensor = Sensor::new(setup.sensor, setup.seed, dt);
    let [ixx, iyy, izz] = p.inertia();
    let authority = [scale.roll * lapse / ixx, scale.pitch * lapse / iyy, scale.yaw / izz];
    let mut model = setup.servo;
    model.set_output(plant.deflections()[0]);
    let mut models = [model; 4];

    let n = (duration_s / dt).round() as usize;
    let (mut t_out, mut roll) = (Vec::with_capacity(n + 1), Vec::with_capacity(n + 1));
    for k in 0..=n {
        let t = k as f64 * dt;
        plant.state.t = t;
        let reading = sensor.read(&plant.state, plant.specific_force(Vector3::zeros()));
        let (phi, _, _) = reading.euler_angles();
        t_out.push(t);
        roll.push(phi);
        if k == n {
            break;
        }
        let [r, pi, y] = att.update((step_rad, 0.0, 0.0), &reading, authority, dt);
        let tilt = (phi.cos()).max(0.5);
        let out = mix(&ActuatorCommand::new(r, pi, y, hover / tilt));
        let targets = out.rotors().map(|u| setup.curve.deflection(u * f).value);
        let cmds: [f64; 4] = std::array::from_fn(|i| models[i].lead_command(targets[i], dt));
        plant.step(cmds, Vector3::zeros(), dt)?;
        for i in 0..4 {
            models[i].step(cmds[i], dt);
        }
    }
    Ok(metrics(step_rad, t_out, roll))
}

/// Rise time, overshoot and steady-state error of a recorded step.
pub fn metrics(step: f64, t: Vec<f64>, y: Vec<f64>) -> StepResponse {
    let cross = |frac: f64| {
        t.iter()
            .zip(&y)
            .find(|(_, v)| **v / step >= frac)
            .map(|(t, _)| *t)
            .unwrap_or(f64::INFINITY)
    };
    let rise = cross(0.9) - cross(0.1);
    let peak = y.iter().map(|v| v / step).fold(f64::NEG_INFINITY, f64::max);
    let t_end = *t.last().unwrap_or(&0.0);
    let tail: Vec<f64> = t
        .iter()
        .zip(&y)
        .filter(|(ti, _)| **ti >= t_end - 0.5)
        .map(|(_, v)| (v - step).abs())
        .collect();
    let sse = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
    StepResponse {
        step_rad: step,
        rise_time_s: rise,
        overshoot: (peak - 1.0).max(0.0),
        steady_state_error_rad: sse,
        t,
        roll: y,
    }
}
