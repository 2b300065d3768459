//! Cascade attitude control, the microgravity vertical-acceleration loop and
//! position hold.

pub mod attitude;
pub mod filter;
pub mod pid;
pub mod position;
pub mod sensor;
pub mod vertical;

use serde::{Deserialize, Serialize};

pub use attitude::{wrap_angle, AttitudeController, AttitudeGains};
pub use filter::LowPass2;
pub use pid::{pid_update, Pid, PidGains, PidState};
pub use position::{PositionController, PositionGains, PositionOutput};
pub use sensor::{Sensor, SensorNoise, SensorReading};
pub use vertical::{VerticalAccelController, VerticalGains};

/// Every controller gain, as stored in the run config.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlGains {
    pub attitude: AttitudeGains,
    pub vertical: VerticalGains,
    pub position: PositionGains,
}
