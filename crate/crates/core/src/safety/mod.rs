//! Fault detection, geofencing and mission mode logic.

pub mod fault;
pub mod geofence;
pub mod mission;

pub use fault::{FaultConfig, FaultFlag, FaultMonitor};
pub use geofence::{
    ballistic_glide, compute_critical_volume, CriticalVolume, Geofence, GeofenceConfig, GeofenceError, NominalCone,
    SafetyAction, SafetyVerdict, VelocityEnvelope,
};
pub use mission::{
    AbortReason, Estimate, Event, EventKind, FaultResponse, MissionConfig, MissionStateMachine, Mode,
};
