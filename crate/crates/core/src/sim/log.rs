//! Flight log: one CSV row per control cycle, plus the event stream.
//!
//! Floats are written in their shortest round-trip form, so a log parses
//! back to identical values and two runs with the same seed produce
//! byte-identical files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::safety::{Event, Mode};

pub const LOG_HEADER: &str = "t,mode,x,y,z,vx,vy,vz,phi,theta,psi,p,q,r,fx,fy,fz,\
thrust_cmd,defl1,defl2,defl3,defl4,cmd1,cmd2,cmd3,cmd4,residual,wind_n,wind_w";

const FLOAT_COLUMNS: usize = 27;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub t: f64,
    pub mode: Mode,
    /// World position and velocity, north-west-up.
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub euler: [f64; 3],
    pub rates: [f64; 3],
    /// True body specific force, m/s².
    pub specific_force: [f64; 3],
    pub thrust_cmd: f64,
    /// Blade angles at the row time, rotor order.
    pub deflections: [f64; 4],
    pub servo_commands: [f64; 4],
    /// Largest fault-monitor residual.
    pub residual: f64,
    pub wind: [f64; 2],
}

impl LogRow {
    fn floats(&self) -> [f64; FLOAT_COLUMNS] {
        let mut v = [0.0; FLOAT_COLUMNS];
        let parts: [&[f64]; 10] = [
            &self.position,
            &self.velocity,
            &self.euler,
            &self.rates,
            &self.specific_force,
            &[self.thrust_cmd],
            &self.deflections,
            &self.servo_commands,
            &[self.residual],
            &self.wind,
        ];
        let mut i = 0;
        for p in parts {
            v[i..i + p.len()].copy_from_slice(p);
            i += p.len();
        }
        v
    }

    fn from_floats(t: f64, mode: Mode, v: &[f64; FLOAT_COLUMNS]) -> Self {
        let a3 = |i: usize| [v[i], v[i + 1], v[i + 2]];
        let a4 = |i: usize| [v[i], v[i + 1], v[i + 2], v[i + 3]];
        Self {
            t,
            mode,
            position: a3(0),
            velocity: a3(3),
            euler: a3(6),
            rates: a3(9),
            specific_force: a3(12),
            thrust_cmd: v[15],
            deflections: a4(16),
            servo_commands: a4(20),
            residual: v[24],
            wind: [v[25], v[26]],
        }
    }

    pub fn specific_force_norm(&self) -> f64 {
        self.specific_force.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn lateral_distance(&self, home: [f64; 2]) -> f64 {
        (self.position[0] - home[0]).hypot(self.position[1] - home[1])
    }
}

pub fn write_log_csv(rows: &[LogRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 400);
    out.push_str(LOG_HEADER);
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{}", r.t, r.mode.as_str());
        for x in r.floats() {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("flight log line {line}: {reason}")]
pub struct LogParseError {
    pub line: usize,
    pub reason: String,
}

pub fn parse_log_csv(text: &str) -> Result<Vec<LogRow>, LogParseError> {
    let err = |line: usize, reason: &str| LogParseError {
        line,
        reason: reason.into(),
    };
    let mut lines = text.lines();
    if lines.next() != Some(LOG_HEADER) {
        return Err(err(1, "unexpected header"));
    }
    let mut rows = Vec::new();
    for (i, l) in lines.enumerate() {
        let n = i + 2;
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != FLOAT_COLUMNS + 2 {
            return Err(err(n, "wrong column count"));
        }
        let t = f[0].parse().map_err(|_| err(n, "bad time"))?;
        let mode = Mode::parse(f[1]).ok_or_else(|| err(n, "unknown mode"))?;
        let mut v = [0.0; FLOAT_COLUMNS];
        for (k, s) in f[2..].iter().enumerate() {
            v[k] = s.parse().map_err(|_| err(n, "bad number"))?;
        }
        rows.push(LogRow::from_floats(t, mode, &v));
    }
    Ok(rows)
}

/// Events as JSON lines.
pub fn write_events(events: &[Event]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events serialise"));
        out.push('\n');
    }
    out
}

pub fn parse_events(text: &str) -> Result<Vec<Event>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

/// Longest contiguous run of airborne rows whose specific force stays within
/// `limit` (m/s²). Returns `(start, end)` times.
pub fn longest_quiet_window(rows: &[LogRow], limit: f64, airborne_from: f64) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    let mut start: Option<f64> = None;
    let mut last = 0.0;
    for r in rows {
        let ok = r.t >= airborne_from && r.position[2] > 0.0 && r.specific_force_norm() <= limit;
        if ok {
            start.get_or_insert(r.t);
            last = r.t;
        } else if let Some(s) = start.take() {
            if best.is_none_or(|(a, b)| last - s > b - a) {
                best = Some((s, last));
            }
        }
    }
    if let Some(s) = start {
        if best.is_none_or(|(a, b)| last - s > b - a) {
            best = Some((s, last));
        }
    }
    best
}
