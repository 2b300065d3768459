//! TOML run configuration. Every field has a default, so an empty file is a
//! valid nominal run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actuation::{ActuatorError, CurveError, ServoModel, ThrustCurve};
use crate::control::{ControlGains, SensorNoise};
use crate::env::{Atmosphere, MissionConstraints, MissionConstraintsRaw, ParamError, VehicleParams, VehicleParamsRaw};
use crate::presets;
use crate::safety::{FaultConfig, FaultResponse, GeofenceConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("thrust curve: {0}")]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Actuator(#[from] ActuatorError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimOptions {
    pub dt_s: f64,
    pub max_time_s: f64,
    /// Time the operator starts the countdown.
    pub arm_time_s: f64,
    /// Time simulated after control returns to the pilot.
    pub post_flight_s: f64,
    pub fault_response: FaultResponse,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            dt_s: 0.004,
            max_time_s: 60.0,
            arm_time_s: 0.5,
            post_flight_s: 0.5,
            fault_response: FaultResponse::Brake,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServoConfig {
    pub tau_s: f64,
    /// Dead-band as a fraction of full travel.
    pub dead_band_fraction: f64,
}

impl Default for ServoConfig {
    fn default() -> Self {
        Self {
            tau_s: crate::actuation::SERVO_TAU,
            dead_band_fraction: crate::actuation::DEAD_BAND_FRACTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub gust_amplitude_m_s: f64,
    pub gust_duration_s: f64,
    pub fault_servo: usize,
    /// Failure time after launch, s.
    pub fault_after_launch_s: f64,
    /// Blade angle the failed servo holds, rad.
    pub fault_position_rad: f64,
    pub monte_carlo_samples: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            gust_amplitude_m_s: 2.0,
            gust_duration_s: 2.0,
            fault_servo: 2,
            fault_after_launch_s: 2.0,
            fault_position_rad: 0.0,
            monte_carlo_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Named vehicle; ignored when `[vehicle]` is given.
    pub preset: String,
    pub vehicle: Option<VehicleParamsRaw>,
    pub constraints: MissionConstraintsRaw,
    pub atmosphere: Atmosphere,
    /// Two-column deflection/thrust table; synthetic curve when absent.
    pub thrust_curve_path: Option<PathBuf>,
    pub sim: SimOptions,
    pub servo: ServoConfig,
    pub gains: ControlGains,
    pub sensor: SensorNoise,
    pub fault: FaultConfig,
    pub geofence: GeofenceConfig,
    pub scenario: ScenarioConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            preset: "nominal".into(),
            vehicle: None,
            constraints: MissionConstraintsRaw::default(),
            atmosphere: Atmosphere::default(),
            thrust_curve_path: None,
            sim: SimOptions::default(),
            servo: ServoConfig::default(),
            gains: ControlGains::default(),
            sensor: SensorNoise::default(),
            fault: FaultConfig::default(),
            geofence: GeofenceConfig::default(),
            scenario: ScenarioConfig::default(),
        }
    }
}

/// Validated, ready-to-run configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub seed: u64,
    pub params: VehicleParams,
    pub constraints: MissionConstraints,
    pub atmosphere: Atmosphere,
    pub curve: ThrustCurve,
    pub servo: ServoModel,
    pub options: SimOptions,
    pub gains: ControlGains,
    pub sensor: SensorNoise,
    pub fault: FaultConfig,
    pub geofence: GeofenceConfig,
    pub scenario: ScenarioConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn setup(&self) -> Result<Setup, ConfigError> {
        let params = match &self.vehicle {
            Some(raw) => VehicleParams::new(raw.clone())?,
            None => presets::by_name(&self.preset).ok_or_else(|| ConfigError::UnknownPreset(self.preset.clone()))?,
        };
        let constraints = MissionConstraints::new(self.constraints.clone())?;
        self.atmosphere.validate()?;
        let curve = match &self.thrust_curve_path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                    path: p.clone(),
                    source,
                })?;
                ThrustCurve::parse(&text)?
            }
            None => ThrustCurve::synthetic(params.thrust_gain(), params.max_blade_deflection()),
        };
        let d = params.max_blade_deflection();
        let servo = ServoModel::new(self.servo.tau_s, self.servo.dead_band_fraction * d, d)?;
        let o = &self.sim;
        if !(o.dt_s > 0.0 && o.dt_s <= 0.02) {
            return Err(ConfigError::Invalid("sim.dt_s must be in (0, 0.02]".into()));
        }
        if !(o.max_time_s > 0.0 && o.arm_time_s >= 0.0 && o.post_flight_s >= 0.0) {
            return Err(ConfigError::Invalid("sim times must be non-negative".into()));
        }
        if self.scenario.fault_servo > 3 {
            return Err(ConfigError::Invalid("scenario.fault_servo must be 0..=3".into()));
        }
        for g in [
            &self.gains.attitude.roll_angle,
            &self.gains.attitude.pitch_angle,
            &self.gains.attitude.yaw_angle,
            &self.gains.attitude.roll_rate,
            &self.gains.attitude.pitch_rate,
            &self.gains.attitude.yaw_rate,
            &self.gains.vertical.pid,
            &self.gains.position.lateral,
            &self.gains.position.vertical,
        ] {
            g.validate().map_err(ConfigError::Invalid)?;
        }
        if !(self.fault.threshold_rad > 0.0 && self.fault.consecutive_samples > 0) {
            return Err(ConfigError::Invalid("fault threshold and sample count must be positive".into()));
        }
        self.geofence
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(Setup {
            seed: self.seed,
            params,
            constraints,
            atmosphere: self.atmosphere,
            curve,
            servo,
            options: self.sim.clone(),
            gains: self.gains,
            sensor: self.sensor,
            fault: self.fault,
            geofence: self.geofence,
            scenario: self.scenario,
        })
    }
}

impl Setup {
    pub fn nominal() -> Self {
        RunConfig::default().setup().expect("default config is valid")
    }
}
