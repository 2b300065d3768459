//! Power-cut Monte Carlo: drop the vehicle from random states inside the
//! critical volume and check that it lands inside the geofence.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::plant::Plant;
use crate::config::Setup;
use crate::dynamics::state::quaternion_from_euler;
use crate::dynamics::{DivergenceError, SimState};
use crate::safety::{Geofence, VelocityEnvelope};

/// Upper bound on one fall, s.
const MAX_FALL_S: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropSample {
    pub start: [f64; 3],
    pub velocity: [f64; 3],
    /// Largest horizontal distance from the fence centre during the fall.
    pub max_radius_m: f64,
    pub max_altitude_m: f64,
    pub landing: [f64; 2],
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropReport {
    pub samples: usize,
    pub inside: usize,
    /// Smallest horizontal distance between any fall and the fence wall, m.
    pub min_wall_clearance_m: f64,
    /// Smallest distance between any fall apex and the fence roof, m.
    pub min_roof_clearance_m: f64,
    pub drops: Vec<DropSample>,
}

impl DropReport {
    pub fn all_inside(&self) -> bool {
        self.inside == self.samples
    }
}

/// Uniform draw of a state inside the critical volume with a velocity
/// inside the envelope.
pub fn draw_state<R: Rng>(rng: &mut R, fence: &Geofence, envelope: &VelocityEnvelope) -> SimState {
    let cv = &fence.critical;
    let (cx, cy) = (fence.fence.center_x_m, fence.fence.center_y_m);
    let h = rng.random_range(0.0..cv.top);
    let rc = cv.radius_at(h).expect("critical volume covers [0, top]");
    let r = rc * rng.random::<f64>().sqrt();
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    let vh = envelope.max_horizontal * rng.random::<f64>().sqrt();
    let b = rng.random_range(0.0..std::f64::consts::TAU);
    let vz = rng.random_range(-envelope.max_descent..=envelope.climb_at(h));
    let mut s = SimState::at_rest(Vector3::new(cx + r * a.cos(), cy + r * a.sin(), h));
    s.attitude = quaternion_from_euler(
        rng.random_range(-0.3..0.3),
        rng.random_range(-0.3..0.3),
        rng.random_range(-3.1..3.1),
    );
    s.rates = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
    let world = Vector3::new(vh * b.cos(), vh * b.sin(), vz);
    let ned = Vector3::new(world.x, -world.y, -world.z);
    s.velocity = s.dcm().transpose() * ned;
    s
}

/// Falls from `start` with motors off until ground contact.
pub fn drop_from(setup: &Setup, fence: &Geofence, start: SimState) -> Result<DropSample, DivergenceError> {
    let dt = setup.options.dt_s;
    let mut plant = Plant::new(
        setup.params.clone(),
        setup.atmosphere,
        setup.curve.clone(),
        setup.servo,
        start,
    );
    plant.cut_power();
    let v0 = start.velocity_world();
    let f = &fence.fence;
    let (mut max_r, mut max_h) = (f.horizontal_distance(&start.position), start.position.z);
    let mut inside = f.contains(&start.position);
    let n = (MAX_FALL_S / dt) as usize;
    for _ in 0..n {
        plant.step([0.0; 4], Vector3::zeros(), dt)?;
        let p = plant.state.position;
        max_r = max_r.max(f.horizontal_distance(&p));
        max_h = max_h.max(p.z);
        inside &= f.contains(&p);
        if plant.touchdown_speed().is_some() {
            break;
        }
    }
    let p = plant.state.position;
    Ok(DropSample {
        start: start.position.into(),
        velocity: v0.into(),
        max_radius_m: max_r,
        max_altitude_m: max_h,
        landing: [p.x, p.y],
        inside,
    })
}

pub fn power_cut_monte_carlo(
    setup: &Setup,
    fence: &Geofence,
    envelope: &VelocityEnvelope,
    samples: usize,
    seed: u64,
) -> Result<DropReport, DivergenceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = &fence.fence;
    let mut drops = Vec::with_capacity(samples);
    for _ in 0..samples {
        let s = draw_state(&mut rng, fence, envelope);
        drops.push(drop_from(setup, fence, s)?);
    }
    let inside = drops.iter().filter(|d| d.inside).count();
    let min = |x: &dyn Fn(&DropSample) -> f64| drops.iter().map(x).fold(f64::INFINITY, f64::min);
    let min_wall_clearance_m = min(&|d| f.radius_m - d.max_radius_m);
    let min_roof_clearance_m = min(&|d| f.height_m - d.max_altitude_m);
    Ok(DropReport {
        samples,
        inside,
        min_wall_clearance_m,
        min_roof_clearance_m,
        drops,
    })
}
