//! Independent oracles shared by the integration and acceptance tests.

#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use zerog_core::dynamics::{compose_forces, step, SimState};
use zerog_core::env::{gravity, Atmosphere, MissionConstraints, VehicleParams};
use zerog_core::presets;
use zerog_core::safety::{Geofence, SafetyAction};
use zerog_core::sizing::{static_thrust, thrust_available};

pub const GRID_DT: f64 = 0.004;

/// Result of the brute-force switch-time search.
#[derive(Debug, Clone, Copy)]
pub struct GridPlan {
    pub t_switch1: f64,
    pub t_switch2: f64,
    pub duration: f64,
    pub apogee: f64,
}

fn accel(p: &VehicleParams, atm: &Atmosphere, h: f64, v: f64, thrust: f64, cd: f64) -> f64 {
    let drag = 0.5 * atm.density(h) * p.planform_area() * cd * v * v.abs();
    (thrust - drag) / p.mass() - gravity()
}

fn rk4(f: &dyn Fn(f64, f64) -> f64, h: f64, v: f64, dt: f64) -> (f64, f64) {
    let a1 = f(h, v);
    let a2 = f(h + 0.5 * dt * v, v + 0.5 * dt * a1);
    let v2 = v + 0.5 * dt * a1;
    let a3 = f(h + 0.5 * dt * v2, v + 0.5 * dt * a2);
    let v3 = v + 0.5 * dt * a2;
    let a4 = f(h + dt * v3, v + dt * a3);
    let v4 = v + dt * a3;
    (
        h + dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4),
        v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
    )
}

/// Altitude at which a full-thrust brake started from `(h, v)` comes to rest.
fn brake_stop(p: &VehicleParams, atm: &Atmosphere, h: f64, v: f64) -> f64 {
    let f = |h: f64, v: f64| accel(p, atm, h, v, static_thrust(p, atm, h), p.drag_coeff_brake());
    let (mut h, mut v) = (h, v);
    for _ in 0..100_000 {
        let (hn, vn) = rk4(&f, h, v, GRID_DT);
        if vn >= 0.0 {
            // constant-acceleration interpolation inside the last step
            let a = (vn - v) / GRID_DT;
            return h - v * v / (2.0 * a);
        }
        (h, v) = (hn, vn);
    }
    f64::NEG_INFINITY
}

/// Scans both switch times on a `GRID_DT` grid: the latest boost cut-off
/// whose ballistic apogee stays under the ceiling, then the latest brake
/// start that still stops at or above the park altitude.
pub fn grid_search(p: &VehicleParams, atm: &Atmosphere, c: &MissionConstraints) -> GridPlan {
    let g = gravity();
    let ceiling = c.max_altitude();
    let boost = |h: f64, v: f64| accel(p, atm, h, v, thrust_available(p, atm, h, v).unwrap(), p.drag_coeff());
    let (mut h, mut v, mut k) = (0.0, c.initial_launch_speed(), 0_u32);
    loop {
        let (hn, vn) = rk4(&boost, h, v, GRID_DT);
        if hn + vn * vn / (2.0 * g) > ceiling {
            break;
        }
        (h, v, k) = (hn, vn, k + 1);
    }
    let t1 = k as f64 * GRID_DT;
    let apogee = h + v * v / (2.0 * g);

    let coast = |tau: f64| (h + v * tau - 0.5 * g * tau * tau, v - g * tau);
    let mut j = (v / (g * GRID_DT)).floor() as u32;
    loop {
        let (hc, vc) = coast((j + 1) as f64 * GRID_DT);
        if brake_stop(p, atm, hc, vc) < c.park_altitude() {
            break;
        }
        j += 1;
    }
    let duration = j as f64 * GRID_DT;
    GridPlan {
        t_switch1: t1,
        t_switch2: t1 + duration,
        duration,
        apogee,
    }
}

/// Drag-free coast time from the entry altitude: a ballistic arc to the
/// ceiling followed by a constant-deceleration brake ending at park.
pub fn drag_free_coast(p: &VehicleParams, atm: &Atmosphere, c: &MissionConstraints, entry_altitude: f64) -> f64 {
    let g = gravity();
    let (ceiling, park) = (c.max_altitude(), c.park_altitude());
    let a_brake = static_thrust(p, atm, park) / p.mass() - g;
    let v_entry = (2.0 * g * (ceiling - entry_altitude)).sqrt();
    let v_brake = (2.0 * (ceiling - park) / (1.0 / g + 1.0 / a_brake)).sqrt();
    (v_entry + v_brake) / g
}

/// Classifies a point by walking the bands from the ground up.
pub fn verdict_oracle(fence: &Geofence, p: &Vector3<f64>) -> (bool, bool, bool, SafetyAction) {
    let cfg = &fence.fence;
    let r = ((p.x - cfg.center_x_m).powi(2) + (p.y - cfg.center_y_m).powi(2)).sqrt();
    let in_fence = r <= cfg.radius_m && (0.0..=cfg.height_m).contains(&p.z);
    let cv = &fence.critical;
    let mut in_critical = false;
    if in_fence && p.z <= cv.top {
        for (i, &rc) in cv.radii.iter().enumerate() {
            if rc <= 0.0 {
                break;
            }
            let (lo, hi) = (i as f64 * cv.band, (i + 1) as f64 * cv.band);
            let last = i + 1 == cv.radii.len();
            if p.z >= lo && (p.z < hi || last) {
                in_critical = r <= rc;
                break;
            }
        }
    }
    let cone = &fence.nominal;
    let rn = ((p.x - cone.base_x).powi(2) + (p.y - cone.base_y).powi(2)).sqrt();
    let in_nominal = in_critical && p.z <= cone.top && rn <= cone.r0 + cone.k * p.z;
    let action = match (in_critical, in_nominal) {
        (false, _) => SafetyAction::PowerCut,
        (true, false) => SafetyAction::Abort,
        (true, true) => SafetyAction::Continue,
    };
    (in_fence, in_critical, in_nominal, action)
}

/// Drag-free asymmetric body used by the integrator checks.
pub fn tumbling_body() -> VehicleParams {
    presets::nominal()
        .with(|r| {
            r.drag_coeff = 0.0;
            r.inertia_xx_kg_m2 = 0.07;
            r.inertia_yy_kg_m2 = 0.1;
            r.inertia_zz_kg_m2 = 0.15;
        })
        .unwrap()
}

pub fn initial() -> SimState {
    let mut s = SimState::at_rest(Vector3::new(0.0, 0.0, 200.0));
    s.velocity = Vector3::new(3.0, -2.0, 1.0);
    s.rates = Vector3::new(1.5, -0.8, 2.2);
    s
}

pub fn advance(p: &VehicleParams, mut s: SimState, dt: f64, n: usize, mut each: impl FnMut(&SimState)) -> SimState {
    let atm = Atmosphere::default();
    let loads = |x: &SimState| compose_forces(x, p, &atm, [0.0; 4], [0.0; 4], 0.0, Vector3::zeros());
    for _ in 0..n {
        s = step(&s, p, loads, dt).unwrap().state;
        each(&s);
    }
    s
}

pub fn energy(p: &VehicleParams, s: &SimState) -> f64 {
    let i = Vector3::from(p.inertia());
    let rot = 0.5 * s.rates.component_mul(&i).dot(&s.rates);
    0.5 * p.mass() * s.velocity.norm_squared() + rot + p.mass() * gravity() * s.position.z
}

pub fn world_momentum(p: &VehicleParams, s: &SimState) -> Vector3<f64> {
    let i = Matrix3::from_diagonal(&Vector3::from(p.inertia()));
    s.dcm() * i * s.rates
}

/// Observed order from endpoint errors against a 10x refined run, halving
/// the step three times.
pub fn observed_orders(p: &VehicleParams) -> Vec<f64> {
    let horizon = 1.0;
    let end = |dt: f64| advance(p, initial(), dt, (horizon / dt).round() as usize, |_| {}).to_vec();
    let errors: Vec<f64> = [0.01, 0.005, 0.0025, 0.00125]
        .iter()
        .map(|&dt| (end(dt) - end(dt / 10.0)).amax())
        .collect();
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Largest grid point `k/n` in `[0, 1]` with `|base + α·dir| ≤ 1` everywhere.
pub fn brute_scale(base: [f64; 4], dir: [f64; 4], n: u32) -> Option<f64> {
    (0..=n).rev().map(|k| k as f64 / n as f64).find(|&a| feasible(base, dir, a))
}

pub fn feasible(base: [f64; 4], dir: [f64; 4], a: f64) -> bool {
    (0..4).all(|i| (base[i] + a * dir[i]).abs() <= 1.0)
}

/// Rotor outputs of the `(R, P, Y, T)` command `o`.
pub fn rotor_outputs(o: [f64; 4]) -> [f64; 4] {
    let k = zerog_core::actuation::MIX_MATRIX;
    std::array::from_fn(|i| (0..4).map(|j| k[i][j] * o[j]).sum())
}

/// `(R, P, Y, T)` realised by rotor outputs. The mixing matrix has
/// orthogonal columns of squared norm 4.
pub fn realised(u: [f64; 4]) -> [f64; 4] {
    let k = zerog_core::actuation::MIX_MATRIX;
    std::array::from_fn(|j| (0..4).map(|i| k[i][j] * u[i]).sum::<f64>() / 4.0)
}

/// Checks range, channel preservation and priority of one mixer result.
pub fn check_mix(o: [f64; 4], out: &zerog_core::actuation::MixOutput) -> Result<(), String> {
    use zerog_core::actuation::MixStage;
    const TOL: f64 = 1e-9;
    const GRID: u32 = 256;
    if out.outputs.iter().any(|u| !(-1.0..=1.0).contains(u)) {
        return Err(format!("outputs out of range {:?}", out.outputs));
    }
    let r = realised(out.outputs);
    let same = |i: usize, v: f64| (r[i] - v).abs() <= TOL;
    let [roll, pitch, yaw, thrust] = o;
    let rp = rotor_outputs([roll, pitch, 0.0, 0.0]);
    let ok = match out.stage {
        MixStage::Unsaturated => feasible(rotor_outputs(o), [0.0; 4], 0.0) && (0..4).all(|i| same(i, o[i])),
        MixStage::Yaw => {
            !feasible(rotor_outputs(o), [0.0; 4], 0.0)
                && same(0, roll)
                && same(1, pitch)
                && same(3, thrust)
                && same(2, out.alpha * yaw)
                && (0.0..1.0).contains(&out.alpha)
        }
        MixStage::Thrust => {
            // no positive yaw scaling on top of full roll, pitch and thrust
            let base = rotor_outputs([roll, pitch, 0.0, thrust]);
            let dir = rotor_outputs([0.0, 0.0, yaw, 0.0]);
            (yaw == 0.0 || (1..=GRID).all(|k| !feasible(base, dir, k as f64 / GRID as f64)))
                && same(0, roll)
                && same(1, pitch)
                && same(2, 0.0)
                && same(3, out.alpha * thrust)
        }
        MixStage::RollPitch => {
            let dir = rotor_outputs([0.0, 0.0, 0.0, thrust]);
            (thrust == 0.0 || (1..=GRID).all(|k| !feasible(rp, dir, k as f64 / GRID as f64)))
                && same(0, out.alpha * roll)
                && same(1, out.alpha * pitch)
                && same(2, 0.0)
                && same(3, 0.0)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(format!("command {o:?} gave {out:?}, realised {r:?}"))
    }
}

/// The `(base, direction)` pair the mixer scaled for a saturated command.
pub fn scaled_pair(o: [f64; 4], stage: zerog_core::actuation::MixStage) -> ([f64; 4], [f64; 4]) {
    use zerog_core::actuation::MixStage;
    let [roll, pitch, yaw, thrust] = o;
    match stage {
        MixStage::Yaw => (rotor_outputs([roll, pitch, 0.0, thrust]), rotor_outputs([0.0, 0.0, yaw, 0.0])),
        MixStage::Thrust => (rotor_outputs([roll, pitch, 0.0, 0.0]), rotor_outputs([0.0, 0.0, 0.0, thrust])),
        _ => ([0.0; 4], rotor_outputs([roll, pitch, 0.0, 0.0])),
    }
}
