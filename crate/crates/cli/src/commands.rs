//! Subcommand implementations. Each writes its artifacts into one output
//! directory and returns a one-line report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use zerog_core::config::{RunConfig, Setup};
use zerog_core::env::{MissionConstraints, VehicleParams};
use zerog_core::sim::{
    build_geofence, plan_envelope, power_cut_monte_carlo, simulate, write_events, write_log_csv, Scenario, SimError,
};
use zerog_core::sizing::export::plan_csv;
use zerog_core::sizing::{solve_mission, SizingError};

use crate::sizing::{size_payload, SizeError, SizePayload};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] zerog_core::config::ConfigError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// The mission has no solution; exit status 2.
    #[error("{0}")]
    Infeasible(String),
    #[error(transparent)]
    Sizing(#[from] SizingError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("{0}")]
    Invalid(String),
}

impl CommandError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Infeasible(_) => 2,
            _ => 1,
        }
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CommandError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| CommandError::Io { path, source })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serialises");
    s.push('\n');
    s
}

pub fn prepare_out(dir: &Path) -> Result<(), CommandError> {
    fs::create_dir_all(dir).map_err(|source| CommandError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn infeasible(e: SizingError) -> CommandError {
    match e {
        SizingError::Infeasible { .. } => CommandError::Infeasible(e.to_string()),
        other => CommandError::Sizing(other),
    }
}

/// Plan summary with profiles, trajectory table and plot bundle.
pub fn size(setup: &Setup, out: &Path) -> Result<String, CommandError> {
    let payload = match size_payload(&setup.params, &setup.atmosphere, &setup.constraints) {
        Ok(p) => p,
        Err(SizeError::Invalid(e)) => return Err(CommandError::Invalid(SizeError::Invalid(e).to_string())),
        Err(SizeError::Solver(e)) => return Err(CommandError::Sizing(e)),
    };
    let (summary, profiles) = match &payload {
        SizePayload::Feasible { summary, profiles } => (summary, profiles),
        SizePayload::Infeasible { constraint, detail } => {
            return Err(CommandError::Infeasible(format!("infeasible mission ({constraint}): {detail}")))
        }
    };
    let plan = solve_mission(&setup.params, &setup.atmosphere, &setup.constraints).map_err(infeasible)?;
    write(out, "plan_summary.json", &json(&payload))?;
    write(out, "trajectory.csv", &plan_csv(&plan))?;
    write(out, "plot_data.json", &json(profiles))?;
    Ok(format!(
        "microgravity {:.3} s (switch {:.3} s -> {:.3} s), apogee {:.2} m",
        summary.microgravity_duration_s, summary.t_switch1_s, summary.t_switch2_s, summary.apogee_m
    ))
}

/// Closed-loop mission: log, events and summary.
pub fn run_scenario(setup: &Setup, scenario: Scenario, out: &Path) -> Result<String, CommandError> {
    let result = match simulate(setup, scenario) {
        Ok(r) => r,
        Err(SimError::Divergence(e)) => {
            write(out, "last_state.json", &json(&e.last_valid))?;
            return Err(SimError::Divergence(e).into());
        }
        Err(SimError::Sizing(e)) => return Err(infeasible(e)),
        Err(e) => return Err(e.into()),
    };
    write(out, "log.csv", &write_log_csv(&result.rows))?;
    write(out, "events.jsonl", &write_events(&result.events))?;
    write(out, "summary.json", &json(&result.summary))?;
    let s = &result.summary;
    Ok(format!(
        "microgravity window {:.3} s, apogee {:.2} m, drift {:.3} m, final mode {}",
        s.microgravity_window_s,
        s.apogee_m,
        s.max_lateral_drift_m,
        s.final_mode.as_str()
    ))
}

/// Power-cut Monte Carlo over the critical volume.
pub fn geofence_mc(setup: &Setup, out: &Path) -> Result<String, CommandError> {
    let plan = solve_mission(&setup.params, &setup.atmosphere, &setup.constraints).map_err(infeasible)?;
    let fence = build_geofence(setup, &plan).map_err(SimError::from)?;
    let envelope = plan_envelope(&plan, &setup.geofence);
    let report = power_cut_monte_carlo(setup, &fence, &envelope, setup.scenario.monte_carlo_samples, setup.seed)
        .map_err(SimError::from)?;

    let mut volumes = String::from("band_bottom_m,critical_radius_m,margin_m,nominal_radius_m\n");
    let cv = &fence.critical;
    for (i, (r, m)) in cv.radii.iter().zip(&cv.margins).enumerate() {
        let h = i as f64 * cv.band;
        let _ = writeln!(volumes, "{h},{r},{m},{}", fence.nominal.radius_at(h));
    }
    write(out, "volumes.csv", &volumes)?;
    write(out, "geofence_mc.json", &json(&report))?;
    Ok(format!(
        "{}/{} falls inside, wall clearance {:.2} m, roof clearance {:.3} m",
        report.inside, report.samples, report.min_wall_clearance_m, report.min_roof_clearance_m
    ))
}

/// What-if sweep of one vehicle or constraint field.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

fn with_field(setup: &Setup, param: &str, value: f64) -> Result<(VehicleParams, MissionConstraints), String> {
    let set = |mut v: Value| -> Option<Value> {
        let obj = v.as_object_mut()?;
        if !obj.contains_key(param) {
            return None;
        }
        obj.insert(param.to_string(), value.into());
        Some(v)
    };
    let vehicle = serde_json::to_value(setup.params.to_raw()).expect("raw params serialise");
    let constraints = serde_json::to_value(setup.constraints.to_raw()).expect("constraints serialise");
    if let Some(v) = set(vehicle) {
        let p = serde_json::from_value(v).map_err(|e| e.to_string())?;
        return Ok((VehicleParams::new(p).map_err(|e| e.to_string())?, setup.constraints.clone()));
    }
    if let Some(c) = set(constraints) {
        let c = serde_json::from_value(c).map_err(|e| e.to_string())?;
        return Ok((setup.params.clone(), MissionConstraints::new(c).map_err(|e| e.to_string())?));
    }
    Err(format!("unknown sweep parameter `{param}`"))
}

pub fn sweep(setup: &Setup, spec: &Sweep, out: &Path) -> Result<String, CommandError> {
    if spec.steps < 2 || !(spec.from.is_finite() && spec.to.is_finite()) {
        return Err(CommandError::Invalid("sweep needs finite bounds and at least 2 steps".into()));
    }
    with_field(setup, &spec.param, spec.from).map_err(CommandError::Invalid)?;
    let values: Vec<f64> = (0..spec.steps)
        .map(|i| spec.from + (spec.to - spec.from) * i as f64 / (spec.steps - 1) as f64)
        .collect();
    let rows: Vec<String> = values
        .par_iter()
        .map(|&v| match with_field(setup, &spec.param, v) {
            Err(e) => format!("{v},false,,,,,invalid: {}", e.replace(',', ";")),
            Ok((p, c)) => match solve_mission(&p, &setup.atmosphere, &c) {
                Ok(plan) => format!(
                    "{v},true,{},{},{},{},",
                    plan.microgravity_duration, plan.t_switch1, plan.t_switch2, plan.apogee
                ),
                Err(SizingError::Infeasible { constraint, .. }) => format!("{v},false,,,,,{constraint}"),
                Err(e) => format!("{v},false,,,,,{}", e.to_string().replace(',', ";")),
            },
        })
        .collect();
    let mut csv = format!("{},feasible,duration_s,t_switch1_s,t_switch2_s,apogee_m,constraint\n", spec.param);
    for r in &rows {
        csv.push_str(r);
        csv.push('\n');
    }
    write(out, "sweep.csv", &csv)?;
    let feasible = rows.iter().filter(|r| r.contains(",true,")).count();
    Ok(format!("{feasible}/{} sweep points feasible", rows.len()))
}

/// Loads the config file (or defaults) and applies the seed override.
pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<RunConfig, CommandError> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}
