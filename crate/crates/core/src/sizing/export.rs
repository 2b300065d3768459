//! Plan export: trajectory table, summary record and plot-data bundle.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::solver::{MissionPlan, Phase, PlanSample};

pub const PLAN_HEADER: &str = "t,h,hdot,hddot,thrust,phase";

/// Compact description of a plan, shared by the CLI and the service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub t_switch1_s: f64,
    pub t_switch2_s: f64,
    pub microgravity_duration_s: f64,
    pub apogee_m: f64,
    pub entry_altitude_m: f64,
    pub entry_speed_m_s: f64,
    pub stop_time_s: f64,
    pub stop_altitude_m: f64,
    pub max_climb_speed_m_s: f64,
    pub max_descent_speed_m_s: f64,
}

impl From<&MissionPlan> for PlanSummary {
    fn from(p: &MissionPlan) -> Self {
        Self {
            t_switch1_s: p.t_switch1,
            t_switch2_s: p.t_switch2,
            microgravity_duration_s: p.microgravity_duration,
            apogee_m: p.apogee,
            entry_altitude_m: p.entry_altitude,
            entry_speed_m_s: p.entry_speed,
            stop_time_s: p.stop_time,
            stop_altitude_m: p.stop_altitude,
            max_climb_speed_m_s: p.max_climb_speed(),
            max_descent_speed_m_s: p.max_descent_speed(),
        }
    }
}

/// Column-oriented profiles for plotting. All arrays share one length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotBundle {
    pub t: Vec<f64>,
    pub altitude: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
    pub thrust: Vec<f64>,
    pub phase: Vec<Phase>,
}

impl From<&MissionPlan> for PlotBundle {
    fn from(p: &MissionPlan) -> Self {
        let s = &p.trajectory.samples;
        Self {
            t: s.iter().map(|x| x.t).collect(),
            altitude: s.iter().map(|x| x.h).collect(),
            velocity: s.iter().map(|x| x.hdot).collect(),
            acceleration: s.iter().map(|x| x.hddot).collect(),
            thrust: s.iter().map(|x| x.thrust).collect(),
            phase: s.iter().map(|x| x.phase).collect(),
        }
    }
}

/// Writes the trajectory table. Floats use the shortest round-trip
/// representation, so [`parse_plan_csv`] recovers every sample exactly.
pub fn plan_csv(plan: &MissionPlan) -> String {
    let mut out = String::with_capacity(plan.trajectory.len() * 64);
    out.push_str(PLAN_HEADER);
    out.push('\n');
    for s in &plan.trajectory.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.t,
            s.h,
            s.hdot,
            s.hddot,
            s.thrust,
            s.phase.as_str()
        );
    }
    out
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("plan table line {line}: {reason}")]
pub struct PlanParseError {
    pub line: usize,
    pub reason: String,
}

pub fn parse_plan_csv(text: &str) -> Result<Vec<PlanSample>, PlanParseError> {
    let mut lines = text.lines();
    let err = |line, reason: &str| PlanParseError {
        line,
        reason: reason.to_string(),
    };
    if lines.next() != Some(PLAN_HEADER) {
        return Err(err(1, "unexpected header"));
    }
    let mut out = Vec::new();
    for (i, l) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 6 {
            return Err(err(n, "expected 6 columns"));
        }
        let num = |k: usize| f[k].parse::<f64>().map_err(|_| err(n, "bad number"));
        out.push(PlanSample {
            t: num(0)?,
            h: num(1)?,
            hdot: num(2)?,
            hddot: num(3)?,
            thrust: num(4)?,
            phase: Phase::parse(f[5]).ok_or_else(|| err(n, "unknown phase"))?,
        });
    }
    Ok(out)
}
