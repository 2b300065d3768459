//! Force and moment composition, and the Newton–Euler state derivative.

use nalgebra::{Quaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::state::{SimState, StateVec};
use crate::env::{gravity, Atmosphere, VehicleParams};

/// Yaw-torque sign of each rotor per unit deflection.
pub const ROTOR_SPIN: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyForcesMoments {
    pub gravity: Vector3<f64>,
    pub propulsion: Vector3<f64>,
    pub aero: Vector3<f64>,
    pub moment: Vector3<f64>,
}

impl BodyForcesMoments {
    pub fn force(&self) -> Vector3<f64> {
        self.gravity + self.propulsion + self.aero
    }

    /// What an ideal body-mounted accelerometer reads, m/s².
    pub fn specific_force(&self, mass: f64) -> Vector3<f64> {
        (self.propulsion + self.aero) / mass
    }
}

/// Rotor hub positions `(x, y)` in body axes.
pub fn rotor_positions(params: &VehicleParams) -> [(f64, f64); 4] {
    let (lx, ly) = (params.arm_x(), params.arm_y());
    [(lx, ly), (-lx, ly), (-lx, -ly), (lx, -ly)]
}

/// Gravity, rotor thrust and quadratic body drag in body axes.
///
/// `wind_ned` is the air-mass velocity in NED axes. Rotor thrusts act along
/// body `-z` at the hub positions; `torques` are signed yaw reactions.
pub fn compose_forces(
    state: &SimState,
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    thrusts: [f64; 4],
    torques: [f64; 4],
    drag_coeff: f64,
    wind_ned: Vector3<f64>,
) -> BodyForcesMoments {
    let m = params.mass();
    let r = state.dcm();
    let gravity = r.transpose() * Vector3::new(0.0, 0.0, m * gravity());
    let total: f64 = thrusts.iter().sum();
    let propulsion = Vector3::new(0.0, 0.0, -total);

    let v_air = state.velocity - r.transpose() * wind_ned;
    let rho = atmosphere.density(state.altitude());
    let aero = -0.5 * rho * params.planform_area() * drag_coeff * v_air.norm() * v_air;

    let mut moment = Vector3::zeros();
    for ((x, y), (t, q)) in rotor_positions(params).iter().zip(thrusts.iter().zip(torques)) {
        moment.x -= y * t;
        moment.y += x * t;
        moment.z += q;
    }
    BodyForcesMoments {
        gravity,
        propulsion,
        aero,
        moment,
    }
}

/// Time derivative of the flat state vector under the given loads.
pub fn state_derivative(state: &SimState, forces: &BodyForcesMoments, params: &VehicleParams) -> StateVec {
    let m = params.mass();
    let [ixx, iyy, izz] = params.inertia();
    let (u, v, w) = (state.velocity.x, state.velocity.y, state.velocity.z);
    let (p, q, r) = (state.rates.x, state.rates.y, state.rates.z);
    let f = forces.force();
    let mm = forces.moment;

    let vel = Vector3::new(v * r - w * q, w * p - u * r, u * q - v * p) + f / m;
    let omega = Vector3::new(
        (q * r * (iyy - izz) + mm.x) / ixx,
        (p * r * (izz - ixx) + mm.y) / iyy,
        (p * q * (ixx - iyy) + mm.z) / izz,
    );
    let qdot = 0.5 * (state.attitude * Quaternion::new(0.0, p, q, r));
    let ned = state.velocity_ned();

    let mut d = StateVec::zeros();
    d[0] = ned.x;
    d[1] = -ned.y;
    d[2] = -ned.z;
    d[3] = qdot.w;
    d[4] = qdot.i;
    d[5] = qdot.j;
    d[6] = qdot.k;
    d.fixed_rows_mut::<3>(7).copy_from(&vel);
    d.fixed_rows_mut::<3>(10).copy_from(&omega);
    d
}
