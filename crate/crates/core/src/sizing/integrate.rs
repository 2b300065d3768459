//! Fixed-step RK4 integration of the vertical equation of motion.

use serde::{Deserialize, Serialize};

use super::{accel_1d_with_cd, SizingError};
use crate::env::{Atmosphere, VehicleParams};

/// Integration step of the sizing model, s.
pub const PLAN_DT: f64 = 0.004;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample1D {
    pub t: f64,
    pub h: f64,
    pub hdot: f64,
    pub hddot: f64,
    pub thrust: f64,
}

/// When a phase ends.
pub enum StopCondition<'a> {
    /// Stop exactly at this absolute time (final step shortened).
    AtTime(f64),
    /// Stop where `event(t, h, hdot)` first becomes non-negative. The final
    /// partial step is located by regula falsi, so the end state is a smooth
    /// function of the initial state.
    Crossing(&'a dyn Fn(f64, f64, f64) -> f64),
}

type Policy<'a> = &'a dyn Fn(f64, f64, f64) -> f64;

struct Rhs<'a> {
    params: &'a VehicleParams,
    atmosphere: &'a Atmosphere,
    policy: Policy<'a>,
    cd: f64,
}

impl Rhs<'_> {
    fn eval(&self, t: f64, h: f64, v: f64) -> (f64, f64) {
        let thrust = (self.policy)(t, h, v);
        (v, accel_1d_with_cd(self.params, self.atmosphere, h, v, thrust, self.cd))
    }

    fn rk4(&self, t: f64, h: f64, v: f64, dt: f64) -> (f64, f64) {
        let (a1, b1) = self.eval(t, h, v);
        let (a2, b2) = self.eval(t + 0.5 * dt, h + 0.5 * dt * a1, v + 0.5 * dt * b1);
        let (a3, b3) = self.eval(t + 0.5 * dt, h + 0.5 * dt * a2, v + 0.5 * dt * b2);
        let (a4, b4) = self.eval(t + dt, h + dt * a3, v + dt * b3);
        (
            h + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4),
            v + dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4),
        )
    }

    fn sample(&self, t: f64, h: f64, v: f64) -> Sample1D {
        let thrust = (self.policy)(t, h, v);
        Sample1D {
            t,
            h,
            hdot: v,
            hddot: accel_1d_with_cd(self.params, self.atmosphere, h, v, thrust, self.cd),
            thrust,
        }
    }
}

/// Integrates one flight phase from `initial` under a thrust policy
/// `(t, h, hdot) -> N` until the stop condition holds.
///
/// The returned segment starts with the initial sample and ends exactly on
/// the stop condition. Fails with [`SizingError::Divergence`] when
/// `max_duration` elapses first.
#[allow(clippy::too_many_arguments)]
pub fn integrate_phase(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    initial: (f64, f64, f64),
    policy: &dyn Fn(f64, f64, f64) -> f64,
    drag_coeff: f64,
    stop: StopCondition<'_>,
    dt: f64,
    max_duration: f64,
) -> Result<Vec<Sample1D>, SizingError> {
    let rhs = Rhs {
        params,
        atmosphere,
        policy,
        cd: drag_coeff,
    };
    let (t0, h0, v0) = initial;
    let mut out = vec![rhs.sample(t0, h0, v0)];
    let (mut t, mut h, mut v) = (t0, h0, v0);
    let t_cap = t0 + max_duration;

    match stop {
        StopCondition::AtTime(t_end) => {
            if t_end > t_cap {
                return Err(SizingError::Divergence { max_time: max_duration });
            }
            let mut k = 0_u64;
            loop {
                let next = t0 + (k + 1) as f64 * dt;
                if next >= t_end - 1e-12 {
                    let last = t_end - t;
                    if last > 0.0 {
                        (h, v) = rhs.rk4(t, h, v, last);
                        out.push(rhs.sample(t_end, h, v));
                    }
                    return Ok(out);
                }
                (h, v) = rhs.rk4(t, h, v, next - t);
                t = next;
                k += 1;
                out.push(rhs.sample(t, h, v));
            }
        }
        StopCondition::Crossing(event) => {
            if event(t, h, v) >= 0.0 {
                return Ok(out);
            }
            let mut k = 0_u64;
            loop {
                let next = t0 + (k + 1) as f64 * dt;
                if next > t_cap {
                    return Err(SizingError::Divergence { max_time: max_duration });
                }
                let step = next - t;
                let (hn, vn) = rhs.rk4(t, h, v, step);
                if event(next, hn, vn) >= 0.0 {
                    let frac = locate_crossing(&rhs, event, (t, h, v), step)?;
                    let (hc, vc) = rhs.rk4(t, h, v, frac);
                    out.push(rhs.sample(t + frac, hc, vc));
                    return Ok(out);
                }
                (t, h, v) = (next, hn, vn);
                k += 1;
                out.push(rhs.sample(t, h, v));
            }
        }
    }
}

/// Finds the partial step `s ∈ (0, step]` where the event crosses zero.
fn locate_crossing(
    rhs: &Rhs<'_>,
    event: &dyn Fn(f64, f64, f64) -> f64,
    (t, h, v): (f64, f64, f64),
    step: f64,
) -> Result<f64, SizingError> {
    let g = |s: f64| {
        let (hs, vs) = rhs.rk4(t, h, v, s);
        event(t + s, hs, vs)
    };
    let (mut a, mut b) = (0.0, step);
    let (mut ga, mut gb) = (event(t, h, v), g(step));
    // Illinois variant of regula falsi
    let mut side = 0;
    for _ in 0..200 {
        let s = (a * gb - b * ga) / (gb - ga);
        let gs = g(s);
        if gs == 0.0 || (b - a).abs() < 1e-15 {
            return Ok(s);
        }
        if gs < 0.0 {
            a = s;
            ga = gs;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = s;
            gb = gs;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
        if gs.abs() < 1e-13 {
            return Ok(if gs >= 0.0 { s } else { b });
        }
    }
    Err(SizingError::NonConvergence {
        solver: "event location",
        iterations: 200,
        residual: g(b),
    })
}
