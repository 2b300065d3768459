//! Fixed-step Bogacki–Shampine 3(2) integration.

use thiserror::Error;

use super::forces::{state_derivative, BodyForcesMoments};
use super::state::{SimState, StateVec};
use crate::env::VehicleParams;

#[derive(Debug, Clone, PartialEq)]
pub struct Bs3Output {
    /// Third-order solution.
    pub y: StateVec,
    /// Max-norm of the difference to the embedded second-order solution.
    pub error: f64,
    /// Derivative at the new point; equals the next step's first stage when
    /// the right-hand side does not change between steps.
    pub k4: StateVec,
}

/// One Bogacki–Shampine step of `y' = f(t, y)`.
pub fn bs3_step<F>(mut f: F, t: f64, y: &StateVec, h: f64, k1: Option<StateVec>) -> Bs3Output
where
    F: FnMut(f64, &StateVec) -> StateVec,
{
    let k1 = k1.unwrap_or_else(|| f(t, y));
    let k2 = f(t + 0.5 * h, &(y + 0.5 * h * k1));
    let k3 = f(t + 0.75 * h, &(y + 0.75 * h * k2));
    let y3 = y + h * (2.0 / 9.0 * k1 + 1.0 / 3.0 * k2 + 4.0 / 9.0 * k3);
    let k4 = f(t + h, &y3);
    let y2 = y + h * (7.0 / 24.0 * k1 + 0.25 * k2 + 1.0 / 3.0 * k3 + 0.125 * k4);
    Bs3Output {
        error: (y3 - y2).amax(),
        y: y3,
        k4,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("state became non-finite during the step starting at t = {} s", last_valid.t)]
pub struct DivergenceError {
    pub last_valid: SimState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub state: SimState,
    pub error: f64,
}

/// Advances the plant by `dt` with loads evaluated by `loads` at each stage.
/// The quaternion is renormalised afterwards.
pub fn step<L>(state: &SimState, params: &VehicleParams, loads: L, dt: f64) -> Result<StepOutput, DivergenceError>
where
    L: Fn(&SimState) -> BodyForcesMoments,
{
    let rhs = |t: f64, y: &StateVec| {
        let s = SimState::from_vec(t, y);
        state_derivative(&s, &loads(&s), params)
    };
    let out = bs3_step(rhs, state.t, &state.to_vec(), dt, None);
    let mut next = SimState::from_vec(state.t + dt, &out.y);
    next.normalize_attitude();
    if !next.is_finite() {
        return Err(DivergenceError { last_valid: *state });
    }
    Ok(StepOutput {
        state: next,
        error: out.error,
    })
}
