//! Shared vehicle, mission and atmosphere types.
//!
//! Everything here is immutable after construction and validated up front:
//! invalid parameters are rejected, never clamped.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Standard gravity, m/s². Flat-Earth model, so this is a fixed scalar.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// 400 ft in metres.
pub const CEILING_400_FT: f64 = 121.92;

pub fn gravity() -> f64 {
    STANDARD_GRAVITY
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid parameter `{field}`: {reason}")]
pub struct ParamError {
    pub field: String,
    pub reason: String,
}

impl ParamError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

fn positive(field: &str, v: f64) -> Result<(), ParamError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ParamError::new(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), ParamError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(ParamError::new(field, format!("must be finite and >= 0, got {v}")))
    }
}

/// Physical description of one vehicle design.
///
/// Serialized field names carry their units, which is the schema of the
/// `[vehicle]` section in the run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VehicleParamsRaw", into = "VehicleParamsRaw")]
pub struct VehicleParams {
    mass: f64,
    inertia: [f64; 3],
    planform_area: f64,
    drag_coeff: f64,
    drag_coeff_brake: f64,
    prop_diameter: f64,
    engine_power: f64,
    arm_x: f64,
    arm_y: f64,
    thrust_gain: f64,
    dragtorque_gain: f64,
    max_blade_deflection: f64,
    thrust_derating: f64,
}

/// Unvalidated, unit-suffixed mirror of [`VehicleParams`] used for config
/// files and request bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleParamsRaw {
    pub mass_kg: f64,
    pub inertia_xx_kg_m2: f64,
    pub inertia_yy_kg_m2: f64,
    pub inertia_zz_kg_m2: f64,
    pub planform_area_m2: f64,
    pub drag_coeff: f64,
    pub drag_coeff_brake: f64,
    pub prop_diameter_m: f64,
    pub engine_power_w: f64,
    pub arm_x_m: f64,
    pub arm_y_m: f64,
    pub thrust_gain_n_per_rad: f64,
    pub dragtorque_gain_nm_per_rad: f64,
    #[serde(default = "default_max_deflection")]
    pub max_blade_deflection_rad: f64,
    #[serde(default = "default_derating")]
    pub thrust_derating: f64,
}

fn default_max_deflection() -> f64 {
    0.09
}

fn default_derating() -> f64 {
    0.7
}

impl VehicleParamsRaw {
    /// Every invalid field, in declaration order.
    pub fn problems(&self) -> Vec<ParamError> {
        let r = self;
        let mut out: Vec<ParamError> = [
            positive("mass", r.mass_kg),
            positive("inertia_xx", r.inertia_xx_kg_m2),
            positive("inertia_yy", r.inertia_yy_kg_m2),
            positive("inertia_zz", r.inertia_zz_kg_m2),
            positive("planform_area", r.planform_area_m2),
            non_negative("drag_coeff", r.drag_coeff),
            non_negative("drag_coeff_brake", r.drag_coeff_brake),
            positive("prop_diameter", r.prop_diameter_m),
            positive("engine_power", r.engine_power_w),
            positive("arm_x", r.arm_x_m),
            positive("arm_y", r.arm_y_m),
            positive("thrust_gain", r.thrust_gain_n_per_rad),
            positive("dragtorque_gain", r.dragtorque_gain_nm_per_rad),
            positive("max_blade_deflection", r.max_blade_deflection_rad),
            positive("thrust_derating", r.thrust_derating),
        ]
        .into_iter()
        .filter_map(Result::err)
        .collect();
        if r.thrust_derating > 1.0 {
            out.push(ParamError::new("thrust_derating", "must be <= 1"));
        }
        out
    }
}

impl TryFrom<VehicleParamsRaw> for VehicleParams {
    type Error = ParamError;

    fn try_from(r: VehicleParamsRaw) -> Result<Self, ParamError> {
        if let Some(e) = r.problems().into_iter().next() {
            return Err(e);
        }
        Ok(Self {
            mass: r.mass_kg,
            inertia: [r.inertia_xx_kg_m2, r.inertia_yy_kg_m2, r.inertia_zz_kg_m2],
            planform_area: r.planform_area_m2,
            drag_coeff: r.drag_coeff,
            drag_coeff_brake: r.drag_coeff_brake,
            prop_diameter: r.prop_diameter_m,
            engine_power: r.engine_power_w,
            arm_x: r.arm_x_m,
            arm_y: r.arm_y_m,
            thrust_gain: r.thrust_gain_n_per_rad,
            dragtorque_gain: r.dragtorque_gain_nm_per_rad,
            max_blade_deflection: r.max_blade_deflection_rad,
            thrust_derating: r.thrust_derating,
        })
    }
}

impl From<VehicleParams> for VehicleParamsRaw {
    fn from(p: VehicleParams) -> Self {
        Self {
            mass_kg: p.mass,
            inertia_xx_kg_m2: p.inertia[0],
            inertia_yy_kg_m2: p.inertia[1],
            inertia_zz_kg_m2: p.inertia[2],
            planform_area_m2: p.planform_area,
            drag_coeff: p.drag_coeff,
            drag_coeff_brake: p.drag_coeff_brake,
            prop_diameter_m: p.prop_diameter,
            engine_power_w: p.engine_power,
            arm_x_m: p.arm_x,
            arm_y_m: p.arm_y,
            thrust_gain_n_per_rad: p.thrust_gain,
            dragtorque_gain_nm_per_rad: p.dragtorque_gain,
            max_blade_deflection_rad: p.max_blade_deflection,
            thrust_derating: p.thrust_derating,
        }
    }
}

impl VehicleParams {
    pub fn new(raw: VehicleParamsRaw) -> Result<Self, ParamError> {
        Self::try_from(raw)
    }

    pub fn to_raw(&self) -> VehicleParamsRaw {
        self.clone().into()
    }

    /// Returns a copy with one raw field changed and re-validated.
    pub fn with(&self, edit: impl FnOnce(&mut VehicleParamsRaw)) -> Result<Self, ParamError> {
        let mut raw = self.to_raw();
        edit(&mut raw);
        Self::try_from(raw)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    /// Diagonal inertia (xx, yy, zz); products of inertia are neglected.
    pub fn inertia(&self) -> [f64; 3] {
        self.inertia
    }
    pub fn planform_area(&self) -> f64 {
        self.planform_area
    }
    pub fn drag_coeff(&self) -> f64 {
        self.drag_coeff
    }
    /// Drag coefficient with the air-brake deployed.
    pub fn drag_coeff_brake(&self) -> f64 {
        self.drag_coeff_brake
    }
    pub fn prop_diameter(&self) -> f64 {
        self.prop_diameter
    }
    pub fn engine_power(&self) -> f64 {
        self.engine_power
    }
    pub fn arm_x(&self) -> f64 {
        self.arm_x
    }
    pub fn arm_y(&self) -> f64 {
        self.arm_y
    }
    pub fn thrust_gain(&self) -> f64 {
        self.thrust_gain
    }
    pub fn dragtorque_gain(&self) -> f64 {
        self.dragtorque_gain
    }
    pub fn max_blade_deflection(&self) -> f64 {
        self.max_blade_deflection
    }
    pub fn thrust_derating(&self) -> f64 {
        self.thrust_derating
    }
    pub fn weight(&self) -> f64 {
        self.mass * STANDARD_GRAVITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MissionConstraintsRaw", into = "MissionConstraintsRaw")]
pub struct MissionConstraints {
    max_altitude: f64,
    park_altitude: f64,
    min_microgravity_duration: f64,
    microgravity_threshold: f64,
    countdown: f64,
    initial_launch_speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MissionConstraintsRaw {
    pub max_altitude_m: f64,
    pub park_altitude_m: f64,
    pub min_microgravity_duration_s: f64,
    pub microgravity_threshold_g: f64,
    pub countdown_s: f64,
    pub initial_launch_speed_m_s: f64,
}

impl Default for MissionConstraintsRaw {
    fn default() -> Self {
        Self {
            max_altitude_m: CEILING_400_FT,
            park_altitude_m: 15.0,
            min_microgravity_duration_s: 4.0,
            microgravity_threshold_g: 1e-3,
            countdown_s: 5.0,
            initial_launch_speed_m_s: 0.0,
        }
    }
}

impl MissionConstraintsRaw {
    /// Every invalid field, in declaration order.
    pub fn problems(&self) -> Vec<ParamError> {
        let r = self;
        let mut out: Vec<ParamError> = [
            positive("max_altitude", r.max_altitude_m),
            non_negative("park_altitude", r.park_altitude_m),
        ]
        .into_iter()
        .filter_map(Result::err)
        .collect();
        if out.is_empty() && r.park_altitude_m >= r.max_altitude_m {
            out.push(ParamError::new(
                "park_altitude",
                format!(
                    "must be below max_altitude ({} >= {})",
                    r.park_altitude_m, r.max_altitude_m
                ),
            ));
        }
        out.extend(
            [
                non_negative("min_microgravity_duration", r.min_microgravity_duration_s),
                positive("microgravity_threshold", r.microgravity_threshold_g),
                non_negative("countdown", r.countdown_s),
                non_negative("initial_launch_speed", r.initial_launch_speed_m_s),
            ]
            .into_iter()
            .filter_map(Result::err),
        );
        out
    }
}

impl TryFrom<MissionConstraintsRaw> for MissionConstraints {
    type Error = ParamError;

    fn try_from(r: MissionConstraintsRaw) -> Result<Self, ParamError> {
        if let Some(e) = r.problems().into_iter().next() {
            return Err(e);
        }
        Ok(Self {
            max_altitude: r.max_altitude_m,
            park_altitude: r.park_altitude_m,
            min_microgravity_duration: r.min_microgravity_duration_s,
            microgravity_threshold: r.microgravity_threshold_g,
            countdown: r.countdown_s,
            initial_launch_speed: r.initial_launch_speed_m_s,
        })
    }
}

impl From<MissionConstraints> for MissionConstraintsRaw {
    fn from(c: MissionConstraints) -> Self {
        Self {
            max_altitude_m: c.max_altitude,
            park_altitude_m: c.park_altitude,
            min_microgravity_duration_s: c.min_microgravity_duration,
            microgravity_threshold_g: c.microgravity_threshold,
            countdown_s: c.countdown,
            initial_launch_speed_m_s: c.initial_launch_speed,
        }
    }
}

impl Default for MissionConstraints {
    fn default() -> Self {
        MissionConstraintsRaw::default()
            .try_into()
            .expect("default constraints are valid")
    }
}

impl MissionConstraints {
    pub fn new(raw: MissionConstraintsRaw) -> Result<Self, ParamError> {
        Self::try_from(raw)
    }

    pub fn to_raw(&self) -> MissionConstraintsRaw {
        self.clone().into()
    }

    pub fn with(&self, edit: impl FnOnce(&mut MissionConstraintsRaw)) -> Result<Self, ParamError> {
        let mut raw = self.to_raw();
        edit(&mut raw);
        Self::try_from(raw)
    }

    pub fn max_altitude(&self) -> f64 {
        self.max_altitude
    }
    pub fn park_altitude(&self) -> f64 {
        self.park_altitude
    }
    pub fn min_microgravity_duration(&self) -> f64 {
        self.min_microgravity_duration
    }
    /// Allowed |specific force| during microgravity, in g.
    pub fn microgravity_threshold(&self) -> f64 {
        self.microgravity_threshold
    }
    pub fn countdown(&self) -> f64 {
        self.countdown
    }
    pub fn initial_launch_speed(&self) -> f64 {
        self.initial_launch_speed
    }
}

/// Air density model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum Atmosphere {
    Constant {
        #[serde(rename = "sea_level_density_kg_m3", default = "default_rho")]
        sea_level_density: f64,
    },
    /// ISA troposphere: linear temperature lapse, hydrostatic pressure.
    StandardLapse {
        #[serde(rename = "sea_level_density_kg_m3", default = "default_rho")]
        sea_level_density: f64,
        #[serde(rename = "sea_level_temperature_k", default = "default_t0")]
        sea_level_temperature: f64,
        #[serde(rename = "lapse_rate_k_per_m", default = "default_lapse")]
        lapse_rate: f64,
    },
}

pub const SEA_LEVEL_DENSITY: f64 = 1.225;
const MOLAR_MASS_AIR: f64 = 0.028_964_4;
const GAS_CONSTANT: f64 = 8.314_459_8;

fn default_rho() -> f64 {
    SEA_LEVEL_DENSITY
}
fn default_t0() -> f64 {
    288.15
}
fn default_lapse() -> f64 {
    0.0065
}

impl Default for Atmosphere {
    fn default() -> Self {
        Atmosphere::Constant {
            sea_level_density: SEA_LEVEL_DENSITY,
        }
    }
}

impl Atmosphere {
    pub fn standard_lapse() -> Self {
        Atmosphere::StandardLapse {
            sea_level_density: SEA_LEVEL_DENSITY,
            sea_level_temperature: default_t0(),
            lapse_rate: default_lapse(),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        match *self {
            Atmosphere::Constant { sea_level_density } => {
                positive("sea_level_density", sea_level_density)
            }
            Atmosphere::StandardLapse {
                sea_level_density,
                sea_level_temperature,
                lapse_rate,
            } => {
                positive("sea_level_density", sea_level_density)?;
                positive("sea_level_temperature", sea_level_temperature)?;
                non_negative("lapse_rate", lapse_rate)?;
                // keep the temperature positive over the whole operating band
                if sea_level_temperature - lapse_rate * 1000.0 <= 0.0 {
                    return Err(ParamError::new("lapse_rate", "too steep for the operating band"));
                }
                Ok(())
            }
        }
    }

    /// Density in kg/m³. Altitudes down to -100 m are accepted.
    pub fn density(&self, altitude: f64) -> f64 {
        match *self {
            Atmosphere::Constant { sea_level_density } => sea_level_density,
            Atmosphere::StandardLapse {
                sea_level_density,
                sea_level_temperature,
                lapse_rate,
            } => {
                if lapse_rate == 0.0 {
                    // isothermal limit
                    let scale = GAS_CONSTANT * sea_level_temperature
                        / (MOLAR_MASS_AIR * STANDARD_GRAVITY);
                    return sea_level_density * (-altitude / scale).exp();
                }
                let exponent =
                    STANDARD_GRAVITY * MOLAR_MASS_AIR / (GAS_CONSTANT * lapse_rate) - 1.0;
                let ratio = 1.0 - lapse_rate * altitude / sea_level_temperature;
                sea_level_density * ratio.powf(exponent)
            }
        }
    }
}
