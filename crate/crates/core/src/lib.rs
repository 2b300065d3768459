//! Sizing, simulation and safety toolkit for a variable-pitch quadrotor that
//! flies microgravity parabolas.
//!
//! Frames: the world frame is north-west-up (`x_E` north, `y_E` west, `z_E`
//! up). The body frame is forward-right-down, so rotor thrust acts along
//! body `-z`. See [`dynamics`] for the full convention.

pub mod actuation;
pub mod env;
pub mod presets;
pub mod sizing;
pub mod dynamics;
pub mod control;
pub mod safety;
pub mod config;
pub mod sim;
