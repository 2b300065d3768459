use std::sync::OnceLock;

use zerog_core::config::Setup;
use zerog_core::env::CEILING_400_FT;
use zerog_core::safety::{EventKind, Mode};
use zerog_core::sim::{parse_events, parse_log_csv, roll_step, simulate, write_events, write_log_csv, Scenario, SimResult};

fn nominal() -> &'static SimResult {
    static RUN: OnceLock<SimResult> = OnceLock::new();
    RUN.get_or_init(|| simulate(&Setup::nominal(), Scenario::Nominal).unwrap())
}

fn gust() -> &'static SimResult {
    static RUN: OnceLock<SimResult> = OnceLock::new();
    RUN.get_or_init(|| simulate(&Setup::nominal(), Scenario::Gust).unwrap())
}

#[test]
fn nominal_mission_holds_microgravity() {
    let s = &nominal().summary;
    assert!(s.microgravity_window_s >= 4.0, "{}", s.microgravity_window_s);
    assert!(s.apogee_m <= CEILING_400_FT + 0.01, "{}", s.apogee_m);
    assert!(s.max_lateral_drift_m < 1e-9, "{}", s.max_lateral_drift_m);
    assert_eq!(s.final_mode, Mode::Manual);
    assert!(s.power_cut_s.is_none() && s.fault_detected_s.is_none());
}

#[test]
fn nominal_mode_sequence_tracks_the_plan() {
    let s = &nominal().summary;
    let order: Vec<Mode> = s.mode_changes.iter().map(|m| m.mode).collect();
    assert_eq!(
        order,
        [Mode::Countdown, Mode::Ascent, Mode::Microgravity, Mode::Brake, Mode::Stabilize, Mode::Manual]
    );
    let entry = |m| s.mode_entry(m).unwrap();
    assert!((entry(Mode::Microgravity) - s.planned_switch1_s).abs() <= 0.05);
    assert!((entry(Mode::Brake) - s.planned_switch2_s).abs() <= 0.05);
    assert!((entry(Mode::Ascent) - s.launch_time_s).abs() < 1e-9);
}

#[test]
fn nominal_run_raises_no_fault() {
    let r = nominal();
    assert!(!r.events.iter().any(|e| matches!(e.kind, EventKind::FaultDetected { .. } | EventKind::Abort { .. })));
    let threshold = Setup::nominal().fault.threshold_rad;
    assert!(r.rows.iter().all(|row| row.residual <= threshold));
}

#[test]
fn gust_drift_stays_small() {
    let s = &gust().summary;
    assert!(s.max_lateral_drift_m < 2.0, "{}", s.max_lateral_drift_m);
    assert!(s.apogee_m <= CEILING_400_FT + 0.01);
    assert_eq!(s.final_mode, Mode::Manual);
    assert!(gust().rows.iter().any(|r| r.wind[0].abs() + r.wind[1].abs() > 1.0));
}

#[test]
fn stuck_servo_is_flagged_and_aborts() {
    let r = simulate(&Setup::nominal(), Scenario::Faultcase).unwrap();
    let s = &r.summary;
    let (injected, detected) = (s.fault_injected_s.unwrap(), s.fault_detected_s.unwrap());
    assert!(detected >= injected && detected - injected <= 0.25, "{injected} {detected}");
    assert!(s.mode_entry(Mode::Abort).is_some_and(|t| t >= detected));
}

#[test]
fn logs_round_trip_exactly() {
    let r = gust();
    assert_eq!(parse_log_csv(&write_log_csv(&r.rows)).unwrap(), r.rows);
    assert_eq!(parse_events(&write_events(&r.events)).unwrap(), r.events);
}

#[test]
fn same_seed_gives_identical_logs() {
    let again = simulate(&Setup::nominal(), Scenario::Gust).unwrap();
    assert_eq!(write_log_csv(&again.rows), write_log_csv(&gust().rows));
    assert_eq!(write_events(&again.events), write_events(&gust().events));

    let mut other = Setup::nominal();
    other.seed = 2;
    let different = simulate(&other, Scenario::Gust).unwrap();
    assert_ne!(write_log_csv(&different.rows), write_log_csv(&gust().rows));
}

#[test]
fn roll_step_response() {
    let r = roll_step(&Setup::nominal(), 0.1, 3.0).unwrap();
    assert!(r.rise_time_s < 1.0, "{}", r.rise_time_s);
    assert!(r.overshoot < 0.2, "{}", r.overshoot);
    assert!(r.steady_state_error_rad < 0.005, "{}", r.steady_state_error_rad);
}
