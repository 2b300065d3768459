mod common;

use common::{brute_scale, check_mix, scaled_pair};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerog_core::actuation::{mix, ActuatorCommand, MixStage, ServoModel};
use zerog_core::control::pid::{Pid, PidGains};

fn command(o: [f64; 4]) -> ActuatorCommand {
    ActuatorCommand::new(o[0], o[1], o[2], o[3])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4000))]

    #[test]
    fn mixer_respects_range_and_priority(o in prop::array::uniform4(-2.0..2.0_f64)) {
        let out = mix(&command(o));
        prop_assert!(check_mix(o, &out).is_ok(), "{}", check_mix(o, &out).unwrap_err());
    }

    #[test]
    fn unsaturated_commands_pass_through(o in prop::array::uniform4(-0.25..0.25_f64)) {
        let out = mix(&command(o));
        prop_assert_eq!(out.stage, MixStage::Unsaturated);
        prop_assert_eq!(out.alpha, 1.0);
    }

    #[test]
    fn pid_output_and_integral_stay_bounded(
        gains in (0.0..5.0_f64, 0.0..5.0_f64, 0.0..0.5_f64, 0.1..2.0_f64, 0.05..1.0_f64),
        errors in prop::collection::vec(-10.0..10.0_f64, 1..200),
    ) {
        let (kp, ki, kd, lim, ilim) = gains;
        let mut pid = Pid::new(PidGains::new(kp, ki, kd, lim, ilim));
        for (k, e) in errors.iter().enumerate() {
            let u = pid.update(*e, 0.1 * k as f64, 0.004);
            prop_assert!(u.abs() <= lim);
            prop_assert!(pid.state.integrator.abs() <= ilim);
        }
    }

    #[test]
    fn servo_contracts_toward_command(
        start in -0.09..0.09_f64,
        commands in prop::collection::vec(-0.1..0.1_f64, 1..100),
        dt in 0.001..0.02_f64,
    ) {
        let mut s = ServoModel::identified(0.09);
        s.set_output(start);
        for c in commands {
            let before = s.output();
            let after = s.step(c, dt);
            let target = c.clamp(-0.09, 0.09);
            // never overshoots and never moves away from the command
            prop_assert!((after - target).abs() <= (before - target).abs() + 1e-15);
            prop_assert!((after - before) * (c - before) >= 0.0);
            prop_assert!(after.abs() <= 0.09);
            if (c - before).abs() <= s.dead_band() {
                prop_assert_eq!(after, before);
            }
        }
    }
}

#[test]
fn analytic_scale_matches_brute_force_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 200 {
        let o: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let out = mix(&command(o));
        if out.stage == MixStage::Unsaturated {
            continue;
        }
        let (base, dir) = scaled_pair(o, out.stage);
        let brute = brute_scale(base, dir, 100_000).expect("stage has a feasible scale");
        assert!((out.alpha - brute).abs() <= 1e-4, "{o:?}: {} vs {brute}", out.alpha);
        checked += 1;
    }
}
