//! Momentum-theory propulsion envelope used by the vertical sizing model.

use std::f64::consts::PI;

use super::SizingError;
use crate::env::{Atmosphere, VehicleParams};

/// Below this climb speed the available thrust is blended linearly towards
/// the static value, removing the 1/ḣ singularity.
pub const V_BLEND: f64 = 2.0;

const MAX_ITER: usize = 200;

/// Ideal propeller efficiency η in [0, 1) for a given axial speed.
///
/// Solves `ḣ = η (2P / (π ρ D² (1-η)))^(1/3)` for η. The right-hand side is
/// strictly increasing on [0, 1), so the root is unique; a safeguarded
/// Newton iteration brackets it.
pub fn propeller_efficiency(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    altitude: f64,
    hdot: f64,
) -> Result<f64, SizingError> {
    let v = hdot.abs();
    if v == 0.0 {
        return Ok(0.0);
    }
    let rho = atmosphere.density(altitude);
    let d = params.prop_diameter();
    let c = (2.0 * params.engine_power() / (PI * rho * d * d)).cbrt();
    // f(η) = η c (1-η)^(-1/3) - v
    let f = |eta: f64| eta * c / (1.0 - eta).cbrt() - v;
    let df = |eta: f64| {
        let s = (1.0 - eta).cbrt();
        c / s + eta * c / (3.0 * s * (1.0 - eta))
    };

    let (mut lo, mut hi) = (0.0_f64, 1.0 - 1e-15);
    if f(hi) < 0.0 {
        return Err(SizingError::NonConvergence {
            solver: "propeller_efficiency",
            iterations: 0,
            residual: f(hi),
        });
    }
    let mut eta = (v / c).min(0.5);
    for _ in 0..MAX_ITER {
        let r = f(eta);
        if r.abs() <= 1e-13 * v.max(1.0) {
            return Ok(eta);
        }
        if r < 0.0 {
            lo = eta;
        } else {
            hi = eta;
        }
        let step = eta - r / df(eta);
        eta = if step > lo && step < hi {
            step
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON {
            return Ok(eta);
        }
    }
    Err(SizingError::NonConvergence {
        solver: "propeller_efficiency",
        iterations: MAX_ITER,
        residual: f(eta),
    })
}

/// Derated static thrust `derating · ((π/2) D² ρ P²)^(1/3)`.
pub fn static_thrust(params: &VehicleParams, atmosphere: &Atmosphere, altitude: f64) -> f64 {
    let rho = atmosphere.density(altitude);
    let d = params.prop_diameter();
    let p = params.engine_power();
    params.thrust_derating() * (0.5 * PI * d * d * rho * p * p).cbrt()
}

fn dynamic_thrust(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    altitude: f64,
    speed: f64,
) -> Result<f64, SizingError> {
    let eta = propeller_efficiency(params, atmosphere, altitude, speed)?;
    Ok(params.thrust_derating() * eta * params.engine_power() / speed)
}

/// Maximum thrust available at climb speed `hdot`, in newtons.
///
/// `derating · η P / |ḣ|` above [`V_BLEND`], linear blend to the static
/// thrust below it.
pub fn thrust_available(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    altitude: f64,
    hdot: f64,
) -> Result<f64, SizingError> {
    let v = hdot.abs();
    if v >= V_BLEND {
        return dynamic_thrust(params, atmosphere, altitude, v);
    }
    let t0 = static_thrust(params, atmosphere, altitude);
    let tb = dynamic_thrust(params, atmosphere, altitude, V_BLEND)?;
    Ok(t0 + (tb - t0) * v / V_BLEND)
}

/// Ratio of the thrust available at altitude and axial inflow `v_axial`
/// (positive when climbing) to the sea-level static thrust. Descending flow
/// uses the static envelope at that altitude.
pub fn thrust_lapse(
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    altitude: f64,
    v_axial: f64,
) -> Result<f64, SizingError> {
    let reference = static_thrust(params, atmosphere, 0.0);
    if v_axial <= 0.0 {
        return Ok(static_thrust(params, atmosphere, altitude) / reference);
    }
    Ok(thrust_available(params, atmosphere, altitude, v_axial)? / reference)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn example_vehicle(derating: f64) -> VehicleParams {
        presets::nominal()
            .with(|r| {
                r.engine_power_w = 800.0;
                r.prop_diameter_m = 0.4;
                r.thrust_derating = derating;
            })
            .unwrap()
    }

    fn bisect_eta(p: &VehicleParams, rho: f64, v: f64) -> f64 {
        let d = p.prop_diameter();
        let c = (2.0 * p.engine_power() / (PI * rho * d * d)).cbrt();
        let (mut lo, mut hi) = (0.0, 1.0 - 1e-9);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m * c * (1.0 - m as f64).powf(-1.0 / 3.0) < v {
                lo = m;
            } else {
                hi = m;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn efficiency_zero_at_rest() {
        let p = example_vehicle(0.7);
        assert_eq!(propeller_efficiency(&p, &Atmosphere::default(), 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn efficiency_regression_vs_bisection() {
        let p = example_vehicle(0.7);
        let atm = Atmosphere::default();
        let eta = propeller_efficiency(&p, &atm, 0.0, 8.0).unwrap();
        // frozen from an independent bisection to 1e-10 residual
        assert!((eta - 0.470_707_028_482_489).abs() < 1e-10, "{eta}");
        assert!((eta - bisect_eta(&p, 1.225, 8.0)).abs() < 1e-10);
    }

    #[test]
    fn efficiency_monotone() {
        let p = example_vehicle(0.7);
        let atm = Atmosphere::default();
        let e5 = propeller_efficiency(&p, &atm, 0.0, 5.0).unwrap();
        let e20 = propeller_efficiency(&p, &atm, 0.0, 20.0).unwrap();
        assert!(e20 > e5);
        assert!(e20 < 1.0);
        let e_fast = propeller_efficiency(&p, &atm, 0.0, 400.0).unwrap();
        assert!(e_fast > 0.95 && e_fast < 1.0);
    }

    #[test]
    fn static_thrust_hand_value() {
        // 0.7 * ((pi/2) * 0.16 * 1.225 * 640000)^(1/3), inner term 197040.69...
        let p = example_vehicle(0.7);
        let t = thrust_available(&p, &Atmosphere::default(), 0.0, 0.0).unwrap();
        assert!((t - 40.733_339_237_621_4).abs() < 1e-9, "{t}");
    }

    #[test]
    fn derating_scales_linearly() {
        let atm = Atmosphere::default();
        let full = example_vehicle(1.0);
        let der = example_vehicle(0.7);
        for v in [0.0, 1.0, 3.0, 12.0] {
            let a = thrust_available(&full, &atm, 10.0, v).unwrap();
            let b = thrust_available(&der, &atm, 10.0, v).unwrap();
            assert!((b / a - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn blend_is_continuous() {
        let p = example_vehicle(0.7);
        let atm = Atmosphere::default();
        let mut prev_gap = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
            let a = thrust_available(&p, &atm, 0.0, V_BLEND - eps).unwrap();
            let b = thrust_available(&p, &atm, 0.0, V_BLEND + eps).unwrap();
            let gap = (a - b).abs();
            assert!(gap < prev_gap || gap < 1e-9);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-6);
    }

    #[test]
    fn dynamic_thrust_matches_static_limit() {
        // momentum theory: ηP/v → T(0) as v → 0
        let p = example_vehicle(1.0);
        let atm = Atmosphere::default();
        let t0 = static_thrust(&p, &atm, 0.0);
        let t = dynamic_thrust(&p, &atm, 0.0, 1e-4).unwrap();
        assert!((t - t0).abs() / t0 < 1e-4);
    }

    #[test]
    fn lapse_bounds() {
        let p = presets::nominal();
        let atm = Atmosphere::default();
        assert_eq!(thrust_lapse(&p, &atm, 0.0, -10.0).unwrap(), 1.0);
        let l = thrust_lapse(&p, &atm, 0.0, 25.0).unwrap();
        assert!(l > 0.0 && l < 1.0);
        let thin = Atmosphere::standard_lapse();
        let high = thrust_lapse(&p, &thin, 120.0, -1.0).unwrap();
        assert!(high < 1.0 && high > 0.98, "{high}");
    }
}
