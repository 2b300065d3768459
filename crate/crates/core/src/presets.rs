//! Named example vehicles.
//!
//! The thrust gain of each preset is derived from its static propulsion
//! envelope so that four rotors at full deflection deliver exactly the
//! sizing model's static thrust (thrust-to-weight close to 2).

use crate::actuation::thrust_curve::CURVE_ENRICHMENT;
use crate::env::{Atmosphere, VehicleParams, VehicleParamsRaw};
use crate::sizing::propulsion::static_thrust;

const MAX_DEFLECTION: f64 = 0.09;

struct Spec {
    mass: f64,
    inertia: [f64; 3],
    area: f64,
    cd: f64,
    cd_brake: f64,
    power: f64,
    diameter: f64,
    arm: f64,
}

fn build(s: Spec) -> VehicleParams {
    let mut raw = VehicleParamsRaw {
        mass_kg: s.mass,
        inertia_xx_kg_m2: s.inertia[0],
        inertia_yy_kg_m2: s.inertia[1],
        inertia_zz_kg_m2: s.inertia[2],
        planform_area_m2: s.area,
        drag_coeff: s.cd,
        drag_coeff_brake: s.cd_brake,
        prop_diameter_m: s.diameter,
        engine_power_w: s.power,
        arm_x_m: s.arm,
        arm_y_m: s.arm,
        thrust_gain_n_per_rad: 1.0,
        dragtorque_gain_nm_per_rad: 3.0,
        max_blade_deflection_rad: MAX_DEFLECTION,
        thrust_derating: 0.7,
    };
    let probe = VehicleParams::new(raw.clone()).expect("preset is valid");
    let t_static = static_thrust(&probe, &Atmosphere::default(), 0.0);
    raw.thrust_gain_n_per_rad = t_static / (4.0 * MAX_DEFLECTION * (1.0 + CURVE_ENRICHMENT));
    VehicleParams::new(raw).expect("preset is valid")
}

/// 5 kg reference airframe, no air-brake.
pub fn nominal() -> VehicleParams {
    build(spec_of_nominal())
}

/// Reference airframe with an air-brake tripling drag while braking.
pub fn airbrake() -> VehicleParams {
    build(Spec {
        cd_brake: 1.2,
        ..spec_of_nominal()
    })
}

pub fn light() -> VehicleParams {
    build(Spec {
        mass: 3.0,
        inertia: [0.045, 0.045, 0.08],
        area: 0.04,
        cd: 0.5,
        cd_brake: 0.5,
        power: 2500.0,
        diameter: 0.22,
        arm: 0.2,
    })
}

pub fn heavy() -> VehicleParams {
    build(Spec {
        mass: 6.0,
        inertia: [0.11, 0.11, 0.19],
        area: 0.06,
        cd: 0.5,
        cd_brake: 0.5,
        power: 5000.0,
        diameter: 0.31,
        arm: 0.28,
    })
}

pub fn compact() -> VehicleParams {
    build(Spec {
        mass: 4.0,
        inertia: [0.06, 0.06, 0.11],
        area: 0.04,
        cd: 0.5,
        cd_brake: 0.5,
        power: 4000.0,
        diameter: 0.21,
        arm: 0.22,
    })
}

fn spec_of_nominal() -> Spec {
    Spec {
        mass: 5.0,
        inertia: [0.08, 0.08, 0.14],
        area: 0.05,
        cd: 0.4,
        cd_brake: 0.4,
        power: 4000.0,
        diameter: 0.3,
        arm: 0.25,
    }
}

pub const NAMES: [&str; 5] = ["nominal", "airbrake", "light", "heavy", "compact"];

pub fn by_name(name: &str) -> Option<VehicleParams> {
    match name {
        "nominal" => Some(nominal()),
        "airbrake" => Some(airbrake()),
        "light" => Some(light()),
        "heavy" => Some(heavy()),
        "compact" => Some(compact()),
        _ => None,
    }
}

pub fn all() -> Vec<(&'static str, VehicleParams)> {
    NAMES
        .iter()
        .map(|n| (*n, by_name(n).expect("listed preset exists")))
        .collect()
}
