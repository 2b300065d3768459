//! Actuator chain: servo lag with dead-band, static thrust curve, physical
//! allocation and the priority mixer.

pub mod allocation;
pub mod bridge;
pub mod mixer;
pub mod servo;
pub mod thrust_curve;

use thiserror::Error;

pub use allocation::Allocator;
pub use bridge::CommandScale;
pub use mixer::{mix, ActuatorCommand, MixOutput, MixStage, MIX_MATRIX};
pub use servo::{ServoModel, DEAD_BAND_FRACTION, SERVO_TAU};
pub use thrust_curve::{CurveError, Lookup, ThrustCurve, CURVE_ENRICHMENT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ActuatorError {
    #[error("allocation matrix is singular; thrust/torque gains and arms must be non-zero")]
    SingularAllocation,
    #[error("invalid actuator configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}
