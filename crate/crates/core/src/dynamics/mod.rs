//! Rigid-body plant.
//!
//! Conventions, used everywhere in the crate:
//!
//! * World frame: `x_E` north, `y_E` west, `z_E` up. Altitude is `z_E`.
//! * Body frame: forward, right, down. Rotor thrust acts along body `-z`.
//! * The attitude quaternion `(q0, q1, q2, q3)`, scalar first, rotates
//!   body vectors into north-east-down axes. Euler angles are the 3-2-1
//!   sequence relative to NED, so positive pitch raises the nose and
//!   positive roll lowers the right side.
//! * Rotor 1 sits front-right, 2 rear-right, 3 rear-left, 4 front-left.
//!   Rotors 1 and 3 produce positive yaw torque for positive deflection.

pub mod forces;
pub mod integrator;
pub mod state;

pub use forces::{compose_forces, rotor_positions, state_derivative, BodyForcesMoments, ROTOR_SPIN};
pub use integrator::{bs3_step, step, Bs3Output, DivergenceError, StepOutput};
pub use state::{SimState, StateVec};
