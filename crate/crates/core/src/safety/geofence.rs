//! Three nested safety volumes.
//!
//! * Geofence: vertical cylinder the vehicle must never leave.
//! * Critical volume: the subset from which a power cut is guaranteed to
//!   keep the vehicle inside the geofence. Built per altitude band by
//!   shrinking the radius by the longest drag-affected ballistic glide any
//!   velocity in the envelope can produce.
//! * Nominal volume: cone around the planned vertical path.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{gravity, Atmosphere, VehicleParams};

const GLIDE_DT: f64 = 0.002;
const CLIMB_SAMPLES: usize = 41;
/// Relative and absolute padding on each computed glide distance.
const MARGIN_PAD_REL: f64 = 0.02;
const MARGIN_PAD_ABS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeofenceError {
    #[error("invalid geofence configuration: {0}")]
    Config(String),
    #[error("velocity envelope too fast: no altitude band keeps a positive critical radius")]
    EmptyCritical,
    #[error("nominal cone radius {cone:.3} m exceeds the critical radius {critical:.3} m at {altitude} m")]
    NotNested { altitude: f64, cone: f64, critical: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeofenceConfig {
    pub center_x_m: f64,
    pub center_y_m: f64,
    pub radius_m: f64,
    pub height_m: f64,
    pub band_m: f64,
    pub nominal_base_radius_m: f64,
    pub drift_allowance_m: f64,
    pub max_horizontal_speed_m_s: f64,
    /// Headroom added to the planned apogee for the energy bound, m.
    pub energy_margin_m: f64,
}

impl Default for GeofenceConfig {
    fn default() -> Self {
        Self {
            center_x_m: 0.0,
            center_y_m: 0.0,
            radius_m: 50.0,
            height_m: 135.0,
            band_m: 1.0,
            nominal_base_radius_m: 1.0,
            drift_allowance_m: 2.0,
            max_horizontal_speed_m_s: 3.0,
            energy_margin_m: 2.0,
        }
    }
}

impl GeofenceConfig {
    pub fn validate(&self) -> Result<(), GeofenceError> {
        let pos = [
            ("radius_m", self.radius_m),
            ("height_m", self.height_m),
            ("band_m", self.band_m),
            ("nominal_base_radius_m", self.nominal_base_radius_m),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GeofenceError::Config(format!("{name} must be positive")));
            }
        }
        if !(self.drift_allowance_m >= 0.0 && self.max_horizontal_speed_m_s >= 0.0 && self.energy_margin_m >= 0.0) {
            return Err(GeofenceError::Config("allowances must be non-negative".into()));
        }
        Ok(())
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        self.horizontal_distance(p) <= self.radius_m && p.z <= self.height_m && p.z >= 0.0
    }

    pub fn horizontal_distance(&self, p: &Vector3<f64>) -> f64 {
        (p.x - self.center_x_m).hypot(p.y - self.center_y_m)
    }
}

/// Bounds on the velocities the vehicle can have while flying the mission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityEnvelope {
    pub max_horizontal: f64,
    pub max_climb: f64,
    pub max_descent: f64,
    /// Upper bound on `h + ḣ²/2g`.
    pub energy_ceiling: f64,
}

impl VelocityEnvelope {
    pub fn stationary() -> Self {
        Self {
            max_horizontal: 0.0,
            max_climb: 0.0,
            max_descent: 0.0,
            energy_ceiling: f64::INFINITY,
        }
    }

    /// Largest climb rate possible at altitude `h`.
    pub fn climb_at(&self, h: f64) -> f64 {
        let energy = (2.0 * gravity() * (self.energy_ceiling - h)).max(0.0).sqrt();
        self.max_climb.min(energy)
    }
}

/// Point-mass glide with quadratic drag and no thrust, from altitude `h`
/// with horizontal speed `vh` and climb rate `vz`. Returns the horizontal
/// distance at ground contact and the peak altitude.
pub fn ballistic_glide(params: &VehicleParams, atmosphere: &Atmosphere, h: f64, vh: f64, vz: f64) -> (f64, f64) {
    let k = 0.5 * params.planform_area() * params.drag_coeff() / params.mass();
    let g = gravity();
    let f = |z: f64, u: f64, w: f64| {
        let c = k * atmosphere.density(z) * u.hypot(w);
        (u, w, -c * u, -g - c * w)
    };
    let (mut x, mut z, mut u, mut w) = (0.0, h, vh, vz);
    let mut peak = h;
    let dt = GLIDE_DT;
    while z > 0.0 {
        let a = f(z, u, w);
        let b = f(z + 0.5 * dt * a.1, u + 0.5 * dt * a.2, w + 0.5 * dt * a.3);
        let c = f(z + 0.5 * dt * b.1, u + 0.5 * dt * b.2, w + 0.5 * dt * b.3);
        let d = f(z + dt * c.1, u + dt * c.2, w + dt * c.3);
        let (x1, z1) = (
            x + dt / 6.0 * (a.0 + 2.0 * b.0 + 2.0 * c.0 + d.0),
            z + dt / 6.0 * (a.1 + 2.0 * b.1 + 2.0 * c.1 + d.1),
        );
        u += dt / 6.0 * (a.2 + 2.0 * b.2 + 2.0 * c.2 + d.2);
        w += dt / 6.0 * (a.3 + 2.0 * b.3 + 2.0 * c.3 + d.3);
        if z1 <= 0.0 {
            // distance is monotone; extend linearly to the ground crossing
            x += (x1 - x) * z / (z - z1);
            return (x, peak);
        }
        x = x1;
        z = z1;
        peak = peak.max(z);
    }
    (x, peak)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalVolume {
    pub band: f64,
    /// Radius of band `i`, covering altitudes `[i·band, (i+1)·band]`.
    pub radii: Vec<f64>,
    pub margins: Vec<f64>,
    pub top: f64,
}

impl CriticalVolume {
    pub fn radius_at(&self, h: f64) -> Option<f64> {
        if h < 0.0 || h > self.top {
            return None;
        }
        let i = ((h / self.band).floor() as usize).min(self.radii.len() - 1);
        let r = self.radii[i];
        (r > 0.0).then_some(r)
    }
}

pub fn compute_critical_volume(
    fence: &GeofenceConfig,
    params: &VehicleParams,
    atmosphere: &Atmosphere,
    envelope: &VelocityEnvelope,
) -> Result<CriticalVolume, GeofenceError> {
    fence.validate()?;
    let n = (fence.height_m / fence.band_m).ceil() as usize;
    let mut radii = Vec::with_capacity(n);
    let mut margins = Vec::with_capacity(n);
    for i in 0..n {
        let top = ((i + 1) as f64 * fence.band_m).min(fence.height_m);
        let climb = envelope.climb_at(top.min(((i as f64) * fence.band_m).max(0.0)));
        let mut worst: f64 = 0.0;
        let mut peak: f64 = top;
        if envelope.max_horizontal > 0.0 || climb > 0.0 {
            for j in 0..CLIMB_SAMPLES {
                let s = j as f64 / (CLIMB_SAMPLES - 1) as f64;
                let vz = -envelope.max_descent + s * (climb + envelope.max_descent);
                let (d, p) = ballistic_glide(params, atmosphere, top, envelope.max_horizontal, vz);
                worst = worst.max(d);
                peak = peak.max(p);
            }
        }
        let margin = if worst > 0.0 {
            worst * (1.0 + MARGIN_PAD_REL) + MARGIN_PAD_ABS
        } else {
            0.0
        };
        let r = if peak > fence.height_m {
            0.0
        } else {
            (fence.radius_m - margin).max(0.0)
        };
        radii.push(r);
        margins.push(margin);
    }
    // the volume ends below the first band that is empty
    let last = radii.iter().position(|&r| r <= 0.0).unwrap_or(n);
    if last == 0 {
        return Err(GeofenceError::EmptyCritical);
    }
    radii.truncate(last);
    margins.truncate(last);
    let top = (last as f64 * fence.band_m).min(fence.height_m);
    Ok(CriticalVolume {
        band: fence.band_m,
        radii,
        margins,
        top,
    })
}

/// Cone `r(h) = r0 + k·h` around the vertical path through the fence centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalCone {
    pub base_x: f64,
    pub base_y: f64,
    pub r0: f64,
    pub k: f64,
    pub top: f64,
}

impl NominalCone {
    pub fn for_plan(fence: &GeofenceConfig, park_altitude: f64, top: f64) -> Self {
        Self {
            base_x: fence.center_x_m,
            base_y: fence.center_y_m,
            r0: fence.nominal_base_radius_m,
            k: fence.drift_allowance_m / park_altitude.max(1.0),
            top,
        }
    }

    pub fn radius_at(&self, h: f64) -> f64 {
        self.r0 + self.k * h.max(0.0)
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        p.z >= 0.0 && p.z <= self.top && (p.x - self.base_x).hypot(p.y - self.base_y) <= self.radius_at(p.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SafetyAction {
    Continue,
    /// Left the nominal volume: abort and re-centre.
    Abort,
    /// Left the critical volume: motors off for the rest of the flight.
    PowerCut,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyVerdict {
    pub in_geofence: bool,
    pub in_critical: bool,
    pub in_nominal: bool,
    pub action: SafetyAction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geofence {
    pub fence: GeofenceConfig,
    pub critical: CriticalVolume,
    pub nominal: NominalCone,
}

impl Geofence {
    /// Builds all three volumes and checks that they nest.
    pub fn build(
        fence: &GeofenceConfig,
        params: &VehicleParams,
        atmosphere: &Atmosphere,
        envelope: &VelocityEnvelope,
        park_altitude: f64,
    ) -> Result<Self, GeofenceError> {
        let critical = compute_critical_volume(fence, params, atmosphere, envelope)?;
        let nominal = NominalCone::for_plan(fence, park_altitude, critical.top);
        for (i, &r) in critical.radii.iter().enumerate() {
            let h = ((i + 1) as f64 * critical.band).min(critical.top);
            let cone = nominal.radius_at(h);
            let offset = (nominal.base_x - fence.center_x_m).hypot(nominal.base_y - fence.center_y_m);
            if cone + offset > r {
                return Err(GeofenceError::NotNested {
                    altitude: h,
                    cone,
                    critical: r,
                });
            }
        }
        Ok(Self {
            fence: *fence,
            critical,
            nominal,
        })
    }

    pub fn in_critical(&self, p: &Vector3<f64>) -> bool {
        self.fence.contains(p)
            && self
                .critical
                .radius_at(p.z)
                .is_some_and(|r| self.fence.horizontal_distance(p) <= r)
    }

    pub fn check(&self, p: &Vector3<f64>) -> SafetyVerdict {
        let in_geofence = self.fence.contains(p);
        let in_critical = in_geofence && self.in_critical(p);
        let in_nominal = in_critical && self.nominal.contains(p);
        let action = if !in_critical {
            SafetyAction::PowerCut
        } else if !in_nominal {
            SafetyAction::Abort
        } else {
            SafetyAction::Continue
        };
        SafetyVerdict {
            in_geofence,
            in_critical,
            in_nominal,
            action,
        }
    }
}
