//! Closed-loop 6DOF mission simulation and its scenarios.

pub mod flight;
pub mod gust;
pub mod log;
pub mod montecarlo;
pub mod plant;
pub mod response;
pub mod run;

pub use flight::{FlightComputer, FlightOutput};
pub use gust::Gust;
pub use log::{longest_quiet_window, parse_events, parse_log_csv, write_events, write_log_csv, LogRow, LOG_HEADER};
pub use montecarlo::{draw_state, drop_from, power_cut_monte_carlo, DropReport, DropSample};
pub use plant::{Plant, ServoFailure};
pub use response::{roll_step, StepResponse};
pub use run::{build_geofence, plan_envelope, simulate, simulate_with, ModeChange, Scenario, SimError, SimResult, SimSummary};
