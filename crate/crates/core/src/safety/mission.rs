//! Mission mode logic.
//!
//! `Manual → Countdown → Ascent → Microgravity → Brake → Stabilize → Manual`,
//! with `Abort` reachable from every autonomous mode. Phase changes are
//! time-triggered from the plan; the brake ends on a measured stop.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::fault::FaultFlag;
use super::geofence::{SafetyAction, SafetyVerdict};
use crate::env::MissionConstraints;
use crate::sizing::MissionPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Manual,
    Countdown,
    Ascent,
    Microgravity,
    Brake,
    Stabilize,
    Abort,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Manual => "manual",
            Mode::Countdown => "countdown",
            Mode::Ascent => "ascent",
            Mode::Microgravity => "microgravity",
            Mode::Brake => "brake",
            Mode::Stabilize => "stabilize",
            Mode::Abort => "abort",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "manual" => Mode::Manual,
            "countdown" => Mode::Countdown,
            "ascent" => Mode::Ascent,
            "microgravity" => Mode::Microgravity,
            "brake" => Mode::Brake,
            "stabilize" => Mode::Stabilize,
            "abort" => Mode::Abort,
            _ => return None,
        })
    }

    /// Modes flown by the flight computer rather than the pilot.
    pub fn is_autonomous(self) -> bool {
        !matches!(self, Mode::Manual | Mode::Countdown)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortReason {
    StaleEstimate,
    Fault,
    NominalVolume,
    Operator,
}

/// What a detected actuator fault does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultResponse {
    /// Abort and fly the brake-and-hold recovery.
    #[default]
    Brake,
    /// Cut motor power immediately.
    PowerCut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    ModeChange { from: Mode, to: Mode },
    Abort { reason: AbortReason },
    PowerCut,
    FaultDetected { servo: usize, residual: f64 },
    VelocityMismatch { planned_m_s: f64, actual_m_s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// State estimate handed to the mission logic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Time the estimate refers to.
    pub t: f64,
    pub position: Vector3<f64>,
    pub climb_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MissionConfig {
    pub countdown_s: f64,
    /// Plan times, measured from launch.
    pub t_switch1_s: f64,
    pub t_switch2_s: f64,
    pub entry_speed_m_s: f64,
    pub park_altitude_m: f64,
    pub stop_speed_m_s: f64,
    pub stop_band_m: f64,
    pub settle_s: f64,
    /// Relative entry-speed deviation that is logged.
    pub velocity_tolerance: f64,
    pub max_estimate_age_s: f64,
    pub fault_response: FaultResponse,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            countdown_s: 5.0,
            t_switch1_s: 0.0,
            t_switch2_s: 0.0,
            entry_speed_m_s: 0.0,
            park_altitude_m: 15.0,
            stop_speed_m_s: 0.2,
            stop_band_m: 0.5,
            settle_s: 3.0,
            velocity_tolerance: 0.05,
            max_estimate_age_s: 0.05,
            fault_response: FaultResponse::Brake,
        }
    }
}

impl MissionConfig {
    pub fn from_plan(plan: &MissionPlan, constraints: &MissionConstraints) -> Self {
        Self {
            countdown_s: constraints.countdown(),
            t_switch1_s: plan.t_switch1,
            t_switch2_s: plan.t_switch2,
            entry_speed_m_s: plan.entry_speed,
            park_altitude_m: constraints.park_altitude(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionStateMachine {
    config: MissionConfig,
    mode: Mode,
    launch_time: Option<f64>,
    settled_since: Option<f64>,
    power_cut: bool,
    abort_reason: Option<AbortReason>,
    fault_seen: bool,
    events: Vec<Event>,
}

impl MissionStateMachine {
    pub fn new(config: MissionConfig) -> Self {
        Self {
            config,
            mode: Mode::Manual,
            launch_time: None,
            settled_since: None,
            power_cut: false,
            abort_reason: None,
            fault_seen: false,
            events: Vec::new(),
        }
    }

    pub fn config(&self) -> &MissionConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn power_cut(&self) -> bool {
        self.power_cut
    }

    pub fn abort_reason(&self) -> Option<AbortReason> {
        self.abort_reason
    }

    /// Launch time, once the countdown has been started.
    pub fn launch_time(&self) -> Option<f64> {
        self.launch_time
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Starts the countdown. Ignored outside pre-flight manual mode.
    pub fn arm(&mut self, t: f64) -> bool {
        if self.mode != Mode::Manual || self.launch_time.is_some() {
            return false;
        }
        self.launch_time = Some(t + self.config.countdown_s);
        self.transition(t, Mode::Countdown);
        true
    }

    pub fn operator_abort(&mut self, t: f64) {
        if self.mode.is_autonomous() && self.mode != Mode::Abort {
            self.abort(t, AbortReason::Operator);
        }
    }

    /// Advances the mode logic at time `t`.
    pub fn update(
        &mut self,
        t: f64,
        estimate: Option<&Estimate>,
        verdict: Option<&SafetyVerdict>,
        fault: Option<FaultFlag>,
    ) -> Mode {
        if let Some(v) = verdict {
            if v.action == SafetyAction::PowerCut && !self.power_cut {
                self.cut_power(t);
            }
        }
        if let Some(f) = fault {
            if !self.fault_seen {
                self.fault_seen = true;
                self.push(
                    t,
                    EventKind::FaultDetected {
                        servo: f.servo,
                        residual: f.residual,
                    },
                );
                if self.mode.is_autonomous() {
                    match self.config.fault_response {
                        FaultResponse::PowerCut => self.cut_power(t),
                        FaultResponse::Brake => {
                            if self.mode != Mode::Abort {
                                self.abort(t, AbortReason::Fault);
                            }
                        }
                    }
                }
            }
        }
        if self.power_cut {
            return self.mode;
        }

        let fresh = estimate.filter(|e| t - e.t <= self.config.max_estimate_age_s + 1e-12);
        if self.mode.is_autonomous() && self.mode != Mode::Abort {
            if fresh.is_none() {
                self.abort(t, AbortReason::StaleEstimate);
                return self.mode;
            }
            if verdict.is_some_and(|v| v.action == SafetyAction::Abort) {
                self.abort(t, AbortReason::NominalVolume);
                return self.mode;
            }
        }

        let Some(launch) = self.launch_time else {
            return self.mode;
        };
        let since = t - launch;
        match self.mode {
            Mode::Countdown if since >= -1e-9 => self.transition(t, Mode::Ascent),
            Mode::Ascent if since >= self.config.t_switch1_s - 1e-9 => {
                if let Some(e) = fresh {
                    let planned = self.config.entry_speed_m_s;
                    if planned.abs() > 0.0
                        && ((e.climb_rate - planned) / planned).abs() > self.config.velocity_tolerance
                    {
                        self.push(
                            t,
                            EventKind::VelocityMismatch {
                                planned_m_s: planned,
                                actual_m_s: e.climb_rate,
                            },
                        );
                    }
                }
                self.transition(t, Mode::Microgravity);
            }
            Mode::Microgravity if since >= self.config.t_switch2_s - 1e-9 => self.transition(t, Mode::Brake),
            Mode::Brake => {
                if let Some(e) = fresh {
                    if self.stopped(e) {
                        self.transition(t, Mode::Stabilize);
                        self.settled_since = Some(t);
                    }
                }
            }
            Mode::Stabilize => {
                if let Some(e) = fresh {
                    if self.stopped(e) {
                        let start = *self.settled_since.get_or_insert(t);
                        if t - start >= self.config.settle_s - 1e-9 {
                            self.transition(t, Mode::Manual);
                        }
                    } else {
                        self.settled_since = None;
                    }
                }
            }
            _ => {}
        }
        self.mode
    }

    fn stopped(&self, e: &Estimate) -> bool {
        e.climb_rate.abs() < self.config.stop_speed_m_s
            && (e.position.z - self.config.park_altitude_m).abs() < self.config.stop_band_m
    }

    fn abort(&mut self, t: f64, reason: AbortReason) {
        self.abort_reason = Some(reason);
        self.push(t, EventKind::Abort { reason });
        self.transition(t, Mode::Abort);
    }

    fn cut_power(&mut self, t: f64) {
        self.power_cut = true;
        self.push(t, EventKind::PowerCut);
    }

    fn transition(&mut self, t: f64, to: Mode) {
        if to != self.mode {
            self.push(t, EventKind::ModeChange { from: self.mode, to });
            self.mode = to;
        }
    }

    fn push(&mut self, t: f64, kind: EventKind) {
        self.events.push(Event { t, kind });
    }
}
