mod common;

use common::{drag_free_coast, grid_search};
use zerog_core::env::{Atmosphere, MissionConstraints};
use zerog_core::presets;
use zerog_core::sizing::solve_mission;

#[test]
fn solver_matches_grid_search_on_presets() {
    let (atm, c) = (Atmosphere::default(), MissionConstraints::default());
    for (name, p) in presets::all() {
        let plan = solve_mission(&p, &atm, &c).unwrap();
        let grid = grid_search(&p, &atm, &c);
        println!(
            "{name}: solver {:.5} grid {:.5} (t1 {:.4}/{:.4} t2 {:.4}/{:.4})",
            plan.microgravity_duration, grid.duration, plan.t_switch1, grid.t_switch1, plan.t_switch2, grid.t_switch2
        );
        assert!((plan.microgravity_duration - grid.duration).abs() <= 0.01, "{name}");
        assert!(grid.apogee <= c.max_altitude());
    }
}

#[test]
fn drag_free_coast_matches_closed_form() {
    let (atm, c) = (Atmosphere::default(), MissionConstraints::default());
    for (name, p) in presets::all() {
        let p = p.with(|r| {
            r.drag_coeff = 0.0;
            r.drag_coeff_brake = 0.0;
        })
        .unwrap();
        let plan = solve_mission(&p, &atm, &c).unwrap();
        let exact = drag_free_coast(&p, &atm, &c, plan.entry_altitude);
        assert!((plan.microgravity_duration - exact).abs() < 1e-3, "{name}: {} vs {exact}", plan.microgravity_duration);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn duration(edit: impl FnOnce(&mut zerog_core::env::VehicleParamsRaw), launch: f64) -> (f64, f64) {
        let p = presets::nominal().with(edit).unwrap();
        let c = MissionConstraints::default().with(|r| r.initial_launch_speed_m_s = launch).unwrap();
        let plan = solve_mission(&p, &Atmosphere::default(), &c).unwrap();
        (plan.microgravity_duration, plan.t_switch1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn more_power_never_shortens(power in 2500.0..6000.0_f64, extra in 50.0..1500.0_f64) {
            let (a, _) = duration(|r| r.engine_power_w = power, 0.0);
            let (b, _) = duration(|r| r.engine_power_w = power + extra, 0.0);
            prop_assert!(b >= a - 1e-9, "{a} -> {b}");
        }

        #[test]
        fn airbrake_never_shortens(cd in 0.4..1.0_f64, extra in 0.05..1.0_f64) {
            let (a, _) = duration(|r| r.drag_coeff_brake = cd, 0.0);
            let (b, _) = duration(|r| r.drag_coeff_brake = cd + extra, 0.0);
            prop_assert!(b >= a - 1e-9, "{a} -> {b}");
        }

        #[test]
        fn launch_speed_shortens_boost(v0 in 0.0..15.0_f64, extra in 0.5..10.0_f64) {
            let (da, ta) = duration(|_| {}, v0);
            let (db, tb) = duration(|_| {}, v0 + extra);
            prop_assert!(tb < ta, "{ta} -> {tb}");
            prop_assert!(db >= da - 1e-9, "{da} -> {db}");
        }
    }
}
