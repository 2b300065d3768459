//! One-dimensional vertical sizing model and the bang-coast-bang mission
//! solver.
//!
//! The vehicle is a point mass on the vertical axis:
//! `ḧ = (T - m g - ½ ρ(h) S C_d ḣ|ḣ|) / m`. Drag always opposes velocity.

pub mod export;
pub mod integrate;
pub mod propulsion;
pub mod solver;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{gravity, Atmosphere, ParamError, VehicleParams};

pub use integrate::{integrate_phase, Sample1D, StopCondition, PLAN_DT};
pub use propulsion::{propeller_efficiency, static_thrust, thrust_available, thrust_lapse};
pub use solver::{solve_mission, MissionPlan, Phase, Trajectory1D};

/// Constraint named in an infeasibility report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Static thrust does not exceed weight.
    Hover,
    /// The launch speed alone already overshoots the ceiling.
    LaunchSpeed,
    /// The boost phase never reaches the ceiling parabola.
    CeilingUnreachable,
    /// Drag during the coast exceeds the thrust envelope.
    MicrogravityThrust,
    /// The brake cannot stop the vehicle at the park altitude above ground.
    ParkAltitude,
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Constraint::Hover => "hover",
            Constraint::LaunchSpeed => "launch_speed",
            Constraint::CeilingUnreachable => "ceiling_unreachable",
            Constraint::MicrogravityThrust => "microgravity_thrust",
            Constraint::ParkAltitude => "park_altitude",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SizingError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("infeasible mission ({constraint}): {detail}")]
    Infeasible {
        constraint: Constraint,
        detail: String,
    },
    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("integration exceeded {max_time} s without reaching its stop condition")]
    Divergence { max_time: f64 },
}

impl SizingError {
    pub fn infeasible(constraint: Constraint, detail: impl Into<String>) -> Self {
        SizingError::Infeasible {
            constraint,
            detail: detail.into(),
        }
    }
}

/// Signed drag force on the vertical axis (opposes `hdot`).
pub fn drag_force(params: &VehicleParams, atmosphere: &Atmosphere, h: f64, hdot: f64, cd: f64) -> f64 {
    -0.5 * atmosphere.density(h) * params.planform_area() * cd * hdot * hdot.abs()
}

/// Vertical acceleration with the cruise drag coefficient.
pub fn accel_1d(params: &VehicleParams, atmosphere: &Atmosphere, h: f64, hdot: f64, thrust: f64) -> f64 {
    accel_1d_with_cd(params, atmosphere, h, hdot, thrust, params.drag_coeff())
}

pub fn accel_1d_with_cd(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    h: f64,
    hdot: f64,
    thrust: f64,
    cd: f64,
) -> f64 {
    let m = params.mass();
    (thrust - m * gravity() + drag_force(params, atmosphere, h, hdot, cd)) / m
}
