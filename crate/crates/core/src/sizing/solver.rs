//! Bang-coast-bang mission solver.
//!
//! Full thrust is applied until the vehicle's ballistic apogee reaches the
//! ceiling. The vehicle then coasts on that parabola with thrust cancelling
//! drag, and finally brakes at full static thrust as late as possible so
//! that it comes to rest exactly at the park altitude. Only the two switch
//! times are unknown; each is found by a bracketed secant iteration on the
//! integrated trajectory.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use super::integrate::{integrate_phase, Sample1D, StopCondition, PLAN_DT};
use super::propulsion::{static_thrust, thrust_available};
use super::{accel_1d_with_cd, drag_force, Constraint, SizingError};
use crate::env::{gravity, Atmosphere, MissionConstraints, VehicleParams};

const BOOST_MAX_DURATION: f64 = 120.0;
const BRAKE_MAX_DURATION: f64 = 60.0;
const PARKED_HOLD: f64 = 1.0;
const SWITCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Boost,
    Microgravity,
    Brake,
    Parked,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Boost => "boost",
            Phase::Microgravity => "microgravity",
            Phase::Brake => "brake",
            Phase::Parked => "parked",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "boost" => Some(Phase::Boost),
            "microgravity" => Some(Phase::Microgravity),
            "brake" => Some(Phase::Brake),
            "parked" => Some(Phase::Parked),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanSample {
    pub t: f64,
    pub h: f64,
    pub hdot: f64,
    pub hddot: f64,
    pub thrust: f64,
    pub phase: Phase,
}

impl PlanSample {
    fn from_sample(s: &Sample1D, phase: Phase) -> Self {
        Self {
            t: s.t,
            h: s.h,
            hdot: s.hdot,
            hddot: s.hddot,
            thrust: s.thrust,
            phase,
        }
    }
}

/// Altitude, velocity, acceleration and thrust profiles of a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory1D {
    pub samples: Vec<PlanSample>,
}

impl Trajectory1D {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_altitude(&self) -> f64 {
        self.samples.iter().map(|s| s.h).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn phase_samples(&self, phase: Phase) -> impl Iterator<Item = &PlanSample> {
        self.samples.iter().filter(move |s| s.phase == phase)
    }
}

/// Output of [`solve_mission`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    /// Boost → microgravity, seconds after launch.
    pub t_switch1: f64,
    /// Microgravity → brake.
    pub t_switch2: f64,
    pub microgravity_duration: f64,
    pub apogee: f64,
    pub entry_altitude: f64,
    pub entry_speed: f64,
    pub brake_altitude: f64,
    pub brake_speed: f64,
    /// Time at which the brake brings the vehicle to rest.
    pub stop_time: f64,
    pub stop_altitude: f64,
    pub trajectory: Trajectory1D,
}

impl MissionPlan {
    pub fn max_climb_speed(&self) -> f64 {
        self.trajectory.samples.iter().map(|s| s.hdot).fold(0.0, f64::max)
    }

    pub fn max_descent_speed(&self) -> f64 {
        self.trajectory.samples.iter().map(|s| -s.hdot).fold(0.0, f64::max)
    }

    /// Planned state (h, ḣ) at time `t` after launch, linearly interpolated.
    pub fn state_at(&self, t: f64) -> (f64, f64) {
        let s = &self.trajectory.samples;
        let i = s.partition_point(|p| p.t <= t);
        if i == 0 {
            return (s[0].h, s[0].hdot);
        }
        if i >= s.len() {
            let l = s[s.len() - 1];
            return (l.h, l.hdot);
        }
        let (a, b) = (s[i - 1], s[i]);
        let w = (t - a.t) / (b.t - a.t);
        (a.h + w * (b.h - a.h), a.hdot + w * (b.hdot - a.hdot))
    }
}

struct Brake<'a> {
    params: &'a VehicleParams,
    atmosphere: &'a Atmosphere,
    t1: f64,
    h1: f64,
    v1: f64,
}

impl Brake<'_> {
    fn coast(&self, tau: f64) -> (f64, f64) {
        let g = gravity();
        (self.h1 + self.v1 * tau - 0.5 * g * tau * tau, self.v1 - g * tau)
    }

    /// Brakes from the coast state at `tau` until the vehicle stops.
    fn run(&self, tau: f64) -> Result<Vec<Sample1D>, SizingError> {
        let (h, v) = self.coast(tau);
        let (params, atm) = (self.params, self.atmosphere);
        let policy = |_t: f64, h: f64, _v: f64| static_thrust(params, atm, h);
        let stopped = |_t: f64, _h: f64, v: f64| v;
        integrate_phase(
            params,
            atm,
            (self.t1 + tau, h, v),
            &policy,
            params.drag_coeff_brake(),
            StopCondition::Crossing(&stopped),
            PLAN_DT,
            BRAKE_MAX_DURATION,
        )
        .map_err(|e| match e {
            SizingError::Divergence { .. } => SizingError::infeasible(
                Constraint::ParkAltitude,
                "brake phase does not arrest the descent",
            ),
            other => other,
        })
    }

    fn stop_altitude(&self, tau: f64) -> Result<f64, SizingError> {
        Ok(self.run(tau)?.last().expect("segment is non-empty").h)
    }
}

/// Solves a bracketed scalar root of a decreasing-through-zero function with
/// the Illinois secant variant.
fn bracketed_secant(
    f: impl Fn(f64) -> Result<f64, SizingError>,
    mut a: f64,
    mut b: f64,
    solver: &'static str,
) -> Result<f64, SizingError> {
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(SizingError::NonConvergence {
            solver,
            iterations: 0,
            residual: fa.min(fb),
        });
    }
    let mut side = 0;
    for _ in 0..200 {
        let x = (a * fb - b * fa) / (fb - fa);
        let fx = f(x)?;
        if fx == 0.0 || (b - a).abs() < SWITCH_TOL {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if fx.abs() < 1e-11 {
            return Ok(x);
        }
    }
    Err(SizingError::NonConvergence {
        solver,
        iterations: 200,
        residual: fa.abs().min(fb.abs()),
    })
}

/// Computes the bang-coast-bang plan that maximises microgravity time.
pub fn solve_mission(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    constraints: &MissionConstraints,
) -> Result<MissionPlan, SizingError> {
    atmosphere.validate()?;
    let g = gravity();
    let ceiling = constraints.max_altitude();
    let park = constraints.park_altitude();
    let v0 = constraints.initial_launch_speed();

    let t_static = static_thrust(params, atmosphere, 0.0);
    if t_static <= params.weight() {
        return Err(SizingError::infeasible(
            Constraint::Hover,
            format!(
                "static thrust {:.3} N does not exceed weight {:.3} N",
                t_static,
                params.weight()
            ),
        ));
    }
    if v0 * v0 / (2.0 * g) >= ceiling {
        return Err(SizingError::infeasible(
            Constraint::LaunchSpeed,
            format!("launch speed {v0} m/s alone overshoots the {ceiling} m ceiling"),
        ));
    }

    // boost until the ballistic apogee reaches the ceiling
    let policy_err = RefCell::new(None);
    let boost_policy = |_t: f64, h: f64, v: f64| match thrust_available(params, atmosphere, h, v) {
        Ok(t) => t,
        Err(e) => {
            policy_err.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let apogee_gap = |_t: f64, h: f64, v: f64| h + v * v.abs() / (2.0 * g) - ceiling;
    let boost = integrate_phase(
        params,
        atmosphere,
        (0.0, 0.0, v0),
        &boost_policy,
        params.drag_coeff(),
        StopCondition::Crossing(&apogee_gap),
        PLAN_DT,
        BOOST_MAX_DURATION,
    )
    .map_err(|e| match e {
        SizingError::Divergence { max_time } => SizingError::infeasible(
            Constraint::CeilingUnreachable,
            format!("boost did not reach the ceiling parabola within {max_time} s"),
        ),
        other => other,
    })?;
    if let Some(e) = policy_err.into_inner() {
        return Err(e);
    }
    let entry = *boost.last().expect("segment is non-empty");
    let (t1, h1, v1) = (entry.t, entry.h, entry.hdot);
    let apogee = h1 + v1 * v1 / (2.0 * g);

    let brake = Brake {
        params,
        atmosphere,
        t1,
        h1,
        v1,
    };
    let tau_apex = v1 / g;
    let tau_park = (v1 + (v1 * v1 + 2.0 * g * (h1 - park)).sqrt()) / g;
    let tau2 = bracketed_secant(
        |tau| Ok(brake.stop_altitude(tau)? - park),
        tau_apex,
        tau_park,
        "brake switch",
    )?;
    let t2 = t1 + tau2;
    let brake_segment = brake.run(tau2)?;
    let stop = *brake_segment.last().expect("segment is non-empty");
    if stop.h < 0.0 || brake_segment.iter().any(|s| s.h < 0.0) {
        return Err(SizingError::infeasible(
            Constraint::ParkAltitude,
            "vehicle cannot stop above the ground",
        ));
    }

    let mut samples: Vec<PlanSample> = boost[..boost.len() - 1]
        .iter()
        .map(|s| PlanSample::from_sample(s, Phase::Boost))
        .collect();

    // coast: thrust cancels drag, so the arc is an exact parabola
    let cd = params.drag_coeff();
    let mut k = 0_u64;
    loop {
        let tau = k as f64 * PLAN_DT;
        if tau >= tau2 {
            break;
        }
        let (h, v) = brake.coast(tau);
        let thrust = -drag_force(params, atmosphere, h, v, cd);
        let envelope = if v > 0.0 {
            thrust_available(params, atmosphere, h, v)?
        } else {
            static_thrust(params, atmosphere, h)
        };
        if thrust.abs() > envelope {
            return Err(SizingError::infeasible(
                Constraint::MicrogravityThrust,
                format!(
                    "drag {:.3} N at {:.2} m/s exceeds the {:.3} N thrust envelope",
                    thrust.abs(),
                    v,
                    envelope
                ),
            ));
        }
        samples.push(PlanSample {
            t: t1 + tau,
            h,
            hdot: v,
            hddot: accel_1d_with_cd(params, atmosphere, h, v, thrust, cd),
            thrust,
            phase: Phase::Microgravity,
        });
        k += 1;
    }
    samples.extend(
        brake_segment
            .iter()
            .map(|s| PlanSample::from_sample(s, Phase::Brake)),
    );
    let hold = params.weight();
    let n_hold = (PARKED_HOLD / PLAN_DT).round() as u64;
    for k in 1..=n_hold {
        samples.push(PlanSample {
            t: stop.t + k as f64 * PLAN_DT,
            h: stop.h,
            hdot: 0.0,
            hddot: 0.0,
            thrust: hold,
            phase: Phase::Parked,
        });
    }

    let (h2, v2) = brake.coast(tau2);
    Ok(MissionPlan {
        t_switch1: t1,
        t_switch2: t2,
        microgravity_duration: t2 - t1,
        apogee,
        entry_altitude: h1,
        entry_speed: v1,
        brake_altitude: h2,
        brake_speed: v2,
        stop_time: stop.t,
        stop_altitude: stop.h,
        trajectory: Trajectory1D { samples },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn solve(p: &VehicleParams) -> MissionPlan {
        solve_mission(p, &Atmosphere::default(), &MissionConstraints::default()).unwrap()
    }

    #[test]
    fn nominal_plan_meets_constraints() {
        let plan = solve(&presets::nominal());
        assert!(plan.t_switch1 > 0.0 && plan.t_switch2 > plan.t_switch1);
        assert_eq!(plan.microgravity_duration, plan.t_switch2 - plan.t_switch1);
        assert!((plan.apogee - 121.92).abs() < 0.01);
        assert!(plan.trajectory.max_altitude() <= 121.92 + 0.01);
        assert!((plan.stop_altitude - 15.0).abs() < 0.05);
        assert!(plan.microgravity_duration > 5.0, "{}", plan.microgravity_duration);
    }

    #[test]
    fn trajectory_invariants() {
        let plan = solve(&presets::nominal());
        let s = &plan.trajectory.samples;
        assert!(s.windows(2).all(|w| w[1].t > w[0].t));
        let order = |p: Phase| p as u8;
        assert!(s.windows(2).all(|w| order(w[1].phase) >= order(w[0].phase)));
        for ph in [Phase::Boost, Phase::Microgravity, Phase::Brake, Phase::Parked] {
            assert!(plan.trajectory.phase_samples(ph).count() > 0);
        }
        assert!(s.iter().all(|p| p.h >= 0.0 && p.h <= 121.93));
    }

    #[test]
    fn coast_thrust_cancels_drag() {
        let p = presets::nominal();
        let atm = Atmosphere::default();
        let plan = solve(&p);
        for s in plan.trajectory.phase_samples(Phase::Microgravity) {
            let drag = 0.5 * atm.density(s.h) * p.planform_area() * p.drag_coeff() * s.hdot * s.hdot.abs();
            assert!((s.thrust - drag).abs() < 1e-12);
            assert!((s.hddot + gravity()).abs() < 1e-12);
        }
    }

    #[test]
    fn apogee_is_binding() {
        // moving t_switch1 later breaks the ceiling, earlier shortens the window
        let p = presets::nominal();
        let atm = Atmosphere::default();
        let c = MissionConstraints::default();
        let plan = solve(&p);
        let policy = |_t: f64, h: f64, v: f64| thrust_available(&p, &atm, h, v).unwrap();
        let apogee_at = |t: f64| {
            let seg = integrate_phase(&p, &atm, (0.0, 0.0, 0.0), &policy, p.drag_coeff(), StopCondition::AtTime(t), PLAN_DT, 60.0)
                .unwrap();
            let l = seg.last().unwrap();
            l.h + l.hdot * l.hdot / (2.0 * gravity())
        };
        assert!(apogee_at(plan.t_switch1 + 0.01) > c.max_altitude() + 0.01);
        let lower = c.with(|r| r.max_altitude_m = apogee_at(plan.t_switch1 - 0.01)).unwrap();
        let shorter = solve_mission(&p, &atm, &lower).unwrap();
        assert!(shorter.microgravity_duration < plan.microgravity_duration);
    }

    #[test]
    fn deterministic() {
        let a = solve(&presets::nominal());
        let b = solve(&presets::nominal());
        assert_eq!(a, b);
    }

    #[test]
    fn infeasible_hover() {
        let p = presets::nominal().with(|r| r.engine_power_w = 200.0).unwrap();
        let err = solve_mission(&p, &Atmosphere::default(), &MissionConstraints::default()).unwrap_err();
        assert!(matches!(err, SizingError::Infeasible { constraint: Constraint::Hover, .. }));
    }

    #[test]
    fn infeasible_launch_speed() {
        let c = MissionConstraints::default().with(|r| r.initial_launch_speed_m_s = 60.0).unwrap();
        let err = solve_mission(&presets::nominal(), &Atmosphere::default(), &c).unwrap_err();
        assert!(matches!(err, SizingError::Infeasible { constraint: Constraint::LaunchSpeed, .. }));
    }

    #[test]
    fn infeasible_when_drag_dominates_coast() {
        // huge drag: coast compensation exceeds the envelope
        let p = presets::nominal().with(|r| r.drag_coeff = 6.0).unwrap();
        let err = solve_mission(&p, &Atmosphere::default(), &MissionConstraints::default()).unwrap_err();
        assert!(matches!(err, SizingError::Infeasible { .. }), "{err:?}");
    }

    #[test]
    fn state_at_interpolates() {
        let plan = solve(&presets::nominal());
        let (h, v) = plan.state_at(plan.t_switch1);
        assert!((h - plan.entry_altitude).abs() < 1e-9);
        assert!((v - plan.entry_speed).abs() < 1e-9);
    }
}
