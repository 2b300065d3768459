//! Closed-loop mission simulation.

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::flight::FlightComputer;
use super::gust::Gust;
use super::log::{longest_quiet_window, LogRow};
use super::plant::{Plant, ServoFailure};
use crate::config::Setup;
use crate::control::Sensor;
use crate::dynamics::{DivergenceError, SimState};
use crate::env::gravity;
use crate::safety::{
    Event, EventKind, Geofence, GeofenceConfig, GeofenceError, MissionConfig, Mode, VelocityEnvelope,
};
use crate::sizing::{solve_mission, MissionPlan, SizingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Nominal,
    /// Random lateral gust during the flight.
    Gust,
    /// One blade servo fails to a fixed angle during the ascent.
    Faultcase,
}

impl Scenario {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nominal" => Some(Scenario::Nominal),
            "gust" => Some(Scenario::Gust),
            "faultcase" => Some(Scenario::Faultcase),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Sizing(#[from] SizingError),
    #[error(transparent)]
    Geofence(#[from] GeofenceError),
    #[error(transparent)]
    Divergence(#[from] DivergenceError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeChange {
    pub t_s: f64,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub scenario: Scenario,
    pub seed: u64,
    pub launch_time_s: f64,
    /// Planned switch times on the simulation clock.
    pub planned_switch1_s: f64,
    pub planned_switch2_s: f64,
    pub planned_apogee_m: f64,
    pub apogee_m: f64,
    pub max_lateral_drift_m: f64,
    pub microgravity_window_s: f64,
    pub window_start_s: Option<f64>,
    pub window_end_s: Option<f64>,
    /// Largest |specific force| inside the window, in g.
    pub window_max_specific_force_g: Option<f64>,
    pub mode_changes: Vec<ModeChange>,
    pub fault_injected_s: Option<f64>,
    pub fault_detected_s: Option<f64>,
    pub power_cut_s: Option<f64>,
    pub final_mode: Mode,
    pub final_altitude_m: f64,
    /// Horizontal distance from home at the end of the run.
    pub final_offset_m: f64,
    /// Impact speed if the vehicle came down on the ground after launch.
    pub touchdown_speed_m_s: Option<f64>,
    pub end_time_s: f64,
}

impl SimSummary {
    pub fn mode_entry(&self, mode: Mode) -> Option<f64> {
        self.mode_changes.iter().find(|m| m.mode == mode).map(|m| m.t_s)
    }
}

#[derive(Debug, Clone)]
pub struct SimResult {
    pub plan: MissionPlan,
    pub rows: Vec<LogRow>,
    pub events: Vec<Event>,
    pub summary: SimSummary,
}

/// Velocity bounds of a plan, used to size the critical volume.
pub fn plan_envelope(plan: &MissionPlan, fence: &GeofenceConfig) -> VelocityEnvelope {
    VelocityEnvelope {
        max_horizontal: fence.max_horizontal_speed_m_s,
        max_climb: plan.max_climb_speed(),
        max_descent: plan.max_descent_speed(),
        energy_ceiling: plan.apogee + fence.energy_margin_m,
    }
}

pub fn build_geofence(setup: &Setup, plan: &MissionPlan) -> Result<Geofence, GeofenceError> {
    Geofence::build(
        &setup.geofence,
        &setup.params,
        &setup.atmosphere,
        &plan_envelope(plan, &setup.geofence),
        setup.constraints.park_altitude(),
    )
}

pub fn simulate(setup: &Setup, scenario: Scenario) -> Result<SimResult, SimError> {
    let plan = solve_mission(&setup.params, &setup.atmosphere, &setup.constraints)?;
    let geofence = build_geofence(setup, &plan)?;
    simulate_with(setup, scenario, plan, geofence)
}

/// Runs a scenario against an already solved plan and geofence.
pub fn simulate_with(
    setup: &Setup,
    scenario: Scenario,
    plan: MissionPlan,
    geofence: Geofence,
) -> Result<SimResult, SimError> {
    let o = &setup.options;
    let dt = o.dt_s;
    let home = Vector3::new(setup.geofence.center_x_m, setup.geofence.center_y_m, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);

    let mut mission = MissionConfig::from_plan(&plan, &setup.constraints);
    mission.fault_response = o.fault_response;
    let launch = o.arm_time_s + mission.countdown_s;
    let planned_switch2 = launch + plan.t_switch2;

    let gust = (scenario == Scenario::Gust).then(|| {
        let sc = &setup.scenario;
        Gust::random(
            &mut rng,
            (launch, (planned_switch2 - sc.gust_duration_s).max(launch)),
            sc.gust_duration_s,
            sc.gust_amplitude_m_s,
        )
    });
    let failure = (scenario == Scenario::Faultcase).then(|| ServoFailure {
        servo: setup.scenario.fault_servo,
        t: launch + setup.scenario.fault_after_launch_s,
        position_rad: setup.scenario.fault_position_rad,
    });

    let mut plant = Plant::new(
        setup.params.clone(),
        setup.atmosphere,
        setup.curve.clone(),
        setup.servo,
        SimState::at_rest(home),
    );
    plant.set_failure(failure);
    let mut fc = FlightComputer::new(
        setup.params.clone(),
        setup.atmosphere,
        setup.curve.clone(),
        setup.servo,
        &setup.gains,
        mission,
        setup.fault,
        geofence,
        home,
        dt,
    );
    let sensor_seed = rand::Rng::random(&mut rng);
    let mut sensor = Sensor::new(setup.sensor, sensor_seed, dt);

    let arm_k = (o.arm_time_s / dt).round() as u64;
    let max_k = (o.max_time_s / dt).ceil() as u64;
    let mut rows = Vec::with_capacity(max_k.min(100_000) as usize);
    let mut launched = false;
    let mut done_at: Option<f64> = None;
    let mut k = 0_u64;

    loop {
        let t = k as f64 * dt;
        plant.state.t = t;
        let wind = gust.map_or(Vector3::zeros(), |g| g.wind_ned(t));
        let f = plant.specific_force(wind);
        let reading = sensor.read(&plant.state, f);
        if k == arm_k {
            let (_, _, psi) = plant.state.euler_angles();
            fc.arm(t, psi);
        }
        let out = fc.update(&reading);
        if out.mode == Mode::Ascent && !launched {
            launched = true;
            let v0 = setup.constraints.initial_launch_speed();
            if v0 > 0.0 {
                plant.state.velocity = plant.state.dcm().transpose() * Vector3::new(0.0, 0.0, -v0);
            }
        }
        if out.power_cut && !plant.power_cut() {
            plant.cut_power();
        }
        plant.set_brake_drag(out.brake_drag);

        let s = &plant.state;
        let vw = s.velocity_world();
        let (phi, theta, psi) = s.euler_angles();
        let sf = plant.specific_force(wind);
        rows.push(LogRow {
            t,
            mode: out.mode,
            position: s.position.into(),
            velocity: vw.into(),
            euler: [phi, theta, psi],
            rates: s.rates.into(),
            specific_force: sf.into(),
            thrust_cmd: out.command.thrust,
            deflections: plant.deflections(),
            servo_commands: out.servo_commands,
            residual: fc.monitor().residuals().iter().cloned().fold(0.0, f64::max),
            wind: [wind.x, -wind.y],
        });

        let finished = match done_at {
            Some(t_end) => t >= t_end - 1e-9,
            None => {
                if launched && out.mode == Mode::Manual {
                    done_at = Some(t + o.post_flight_s);
                    o.post_flight_s == 0.0
                } else {
                    let down = s.position.z == 0.0 && vw.norm() == 0.0;
                    launched && down && (plant.power_cut() || out.mode == Mode::Abort) && plant.touchdown_speed().is_some()
                }
            }
        };
        if finished || k >= max_k {
            break;
        }

        plant.step(out.servo_commands, wind, dt)?;
        k += 1;
        plant.state.t = k as f64 * dt;
        fc.observe_servos(plant.state.t, plant.deflections());
    }

    let events = fc.mission().events().to_vec();
    let mut summary = summarise(setup, scenario, &plan, &rows, &events, launch, failure.map(|f| f.t), home);
    summary.touchdown_speed_m_s = plant.touchdown_speed();
    Ok(SimResult {
        plan,
        rows,
        events,
        summary,
    })
}

#[allow(clippy::too_many_arguments)]
fn summarise(
    setup: &Setup,
    scenario: Scenario,
    plan: &MissionPlan,
    rows: &[LogRow],
    events: &[Event],
    launch: f64,
    fault_injected: Option<f64>,
    home: Vector3<f64>,
) -> SimSummary {
    let limit = setup.constraints.microgravity_threshold() * gravity();
    let window = longest_quiet_window(rows, limit, launch);
    let last = rows.last().expect("at least one row");
    let mode_changes = events
        .iter()
        .filter_map(|e| match e.kind {
            EventKind::ModeChange { to, .. } => Some(ModeChange { t_s: e.t, mode: to }),
            _ => None,
        })
        .collect();
    SimSummary {
        scenario,
        seed: setup.seed,
        launch_time_s: launch,
        planned_switch1_s: launch + plan.t_switch1,
        planned_switch2_s: launch + plan.t_switch2,
        planned_apogee_m: plan.apogee,
        apogee_m: rows.iter().map(|r| r.position[2]).fold(f64::NEG_INFINITY, f64::max),
        max_lateral_drift_m: rows
            .iter()
            .map(|r| r.lateral_distance([home.x, home.y]))
            .fold(0.0, f64::max),
        microgravity_window_s: window.map_or(0.0, |(a, b)| b - a),
        window_start_s: window.map(|w| w.0),
        window_end_s: window.map(|w| w.1),
        window_max_specific_force_g: window.map(|(a, b)| {
            rows.iter()
                .filter(|r| r.t >= a && r.t <= b)
                .map(|r| r.specific_force_norm() / gravity())
                .fold(0.0, f64::max)
        }),
        mode_changes,
        fault_injected_s: fault_injected,
        fault_detected_s: events.iter().find_map(|e| match e.kind {
            EventKind::FaultDetected { .. } => Some(e.t),
            _ => None,
        }),
        power_cut_s: events.iter().find(|e| e.kind == EventKind::PowerCut).map(|e| e.t),
        final_mode: last.mode,
        final_altitude_m: last.position[2],
        final_offset_m: last.lateral_distance([home.x, home.y]),
        touchdown_speed_m_s: None,
        end_time_s: last.t,
    }
}
