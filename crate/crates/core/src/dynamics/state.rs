use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, Quaternion, SVector, Vector3};
use serde::{Deserialize, Serialize};

/// Flat layout used by the integrator: position, quaternion, body velocity,
/// body rates.
pub type StateVec = SVector<f64, 13>;

const GIMBAL_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    /// `(x_E, y_E, z_E)` in metres, world north-west-up.
    pub position: Vector3<f64>,
    /// Body → NED rotation, scalar first.
    pub attitude: Quaternion<f64>,
    /// `(u, v, w)` in body axes.
    pub velocity: Vector3<f64>,
    /// `(p, q, r)` in body axes.
    pub rates: Vector3<f64>,
}

impl Default for SimState {
    fn default() -> Self {
        Self::at_rest(Vector3::zeros())
    }
}

impl SimState {
    pub fn at_rest(position: Vector3<f64>) -> Self {
        Self {
            t: 0.0,
            position,
            attitude: Quaternion::identity(),
            velocity: Vector3::zeros(),
            rates: Vector3::zeros(),
        }
    }

    pub fn altitude(&self) -> f64 {
        self.position.z
    }

    /// Body → NED direction cosine matrix.
    pub fn dcm(&self) -> Matrix3<f64> {
        dcm(&self.attitude)
    }

    pub fn velocity_ned(&self) -> Vector3<f64> {
        self.dcm() * self.velocity
    }

    /// Inertial velocity in world axes; `z` is the climb rate.
    pub fn velocity_world(&self) -> Vector3<f64> {
        let n = self.velocity_ned();
        Vector3::new(n.x, -n.y, -n.z)
    }

    pub fn climb_rate(&self) -> f64 {
        self.velocity_world().z
    }

    /// 3-2-1 Euler angles `(φ, θ, ψ)`. Within 1e-6 rad of ±π/2 pitch the
    /// heading is reported as 0 and all yaw is folded into roll.
    pub fn euler_angles(&self) -> (f64, f64, f64) {
        euler_from_quaternion(&self.attitude)
    }

    pub fn to_vec(&self) -> StateVec {
        let q = &self.attitude;
        let (p, v, w) = (&self.position, &self.velocity, &self.rates);
        StateVec::from_column_slice(&[
            p.x, p.y, p.z, q.w, q.i, q.j, q.k, v.x, v.y, v.z, w.x, w.y, w.z,
        ])
    }

    pub fn from_vec(t: f64, y: &StateVec) -> Self {
        Self {
            t,
            position: Vector3::new(y[0], y[1], y[2]),
            attitude: Quaternion::new(y[3], y[4], y[5], y[6]),
            velocity: Vector3::new(y[7], y[8], y[9]),
            rates: Vector3::new(y[10], y[11], y[12]),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|x| x.is_finite()) && self.t.is_finite()
    }

    pub fn normalize_attitude(&mut self) {
        self.attitude /= self.attitude.norm();
    }
}

pub fn dcm(q: &Quaternion<f64>) -> Matrix3<f64> {
    let (q0, q1, q2, q3) = (q.w, q.i, q.j, q.k);
    Matrix3::new(
        1.0 - 2.0 * (q2 * q2 + q3 * q3),
        2.0 * (q1 * q2 - q0 * q3),
        2.0 * (q1 * q3 + q0 * q2),
        2.0 * (q1 * q2 + q0 * q3),
        1.0 - 2.0 * (q1 * q1 + q3 * q3),
        2.0 * (q2 * q3 - q0 * q1),
        2.0 * (q1 * q3 - q0 * q2),
        2.0 * (q2 * q3 + q0 * q1),
        1.0 - 2.0 * (q1 * q1 + q2 * q2),
    )
}

pub fn euler_from_quaternion(q: &Quaternion<f64>) -> (f64, f64, f64) {
    let (q0, q1, q2, q3) = (q.w, q.i, q.j, q.k);
    let s = (2.0 * (q0 * q2 - q3 * q1)).clamp(-1.0, 1.0);
    let theta = s.asin();
    if FRAC_PI_2 - theta.abs() < GIMBAL_EPS {
        let r12 = 2.0 * (q1 * q2 - q0 * q3);
        let r22 = 1.0 - 2.0 * (q1 * q1 + q3 * q3);
        let phi = if theta > 0.0 {
            r12.atan2(r22)
        } else {
            (-r12).atan2(r22)
        };
        return (phi, theta, 0.0);
    }
    let phi = (2.0 * (q0 * q1 + q2 * q3)).atan2(1.0 - 2.0 * (q1 * q1 + q2 * q2));
    let psi = (2.0 * (q0 * q3 + q1 * q2)).atan2(1.0 - 2.0 * (q2 * q2 + q3 * q3));
    (phi, theta, psi)
}

pub fn quaternion_from_euler(phi: f64, theta: f64, psi: f64) -> Quaternion<f64> {
    let (sr, cr) = (0.5 * phi).sin_cos();
    let (sp, cp) = (0.5 * theta).sin_cos();
    let (sy, cy) = (0.5 * psi).sin_cos();
    Quaternion::new(
        cr * cp * cy + sr * sp * sy,
        sr * cp * cy - cr * sp * sy,
        cr * sp * cy + sr * cp * sy,
        cr * cp * sy - sr * sp * cy,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn with_q(q: Quaternion<f64>) -> SimState {
        SimState {
            attitude: q,
            ..SimState::default()
        }
    }

    #[test]
    fn identity_is_level() {
        assert_eq!(SimState::default().euler_angles(), (0.0, 0.0, 0.0));
    }

    #[test]
    fn quarter_turn_about_x() {
        let h = std::f64::consts::FRAC_PI_4;
        let (phi, theta, psi) = with_q(Quaternion::new(h.cos(), h.sin(), 0.0, 0.0)).euler_angles();
        assert!((phi - FRAC_PI_2).abs() < 1e-12);
        assert!(theta.abs() < 1e-12 && psi.abs() < 1e-12);
    }

    #[test]
    fn random_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let phi = rng.random_range(-3.1..3.1);
            let theta = rng.random_range(-1.5..1.5);
            let psi = rng.random_range(-3.1..3.1);
            let (a, b, c) = with_q(quaternion_from_euler(phi, theta, psi)).euler_angles();
            assert!((a - phi).abs() < 1e-10 && (b - theta).abs() < 1e-10 && (c - psi).abs() < 1e-10);
        }
    }

    #[test]
    fn gimbal_lock_folds_heading_into_roll() {
        for (phi, psi) in [(0.3, 0.2), (-0.7, 1.1)] {
            for theta in [FRAC_PI_2, -FRAC_PI_2] {
                let q = quaternion_from_euler(phi, theta, psi);
                let (a, b, c) = with_q(q).euler_angles();
                assert_eq!(c, 0.0);
                assert!((b - theta).abs() < 1e-6);
                // same rotation
                let back = dcm(&quaternion_from_euler(a, b, c));
                assert!((back - dcm(&q)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn dcm_is_orthonormal_and_matches_nalgebra() {
        let q = quaternion_from_euler(0.4, -0.2, 1.3);
        let r = dcm(&q);
        assert!((r.transpose() * r - Matrix3::identity()).norm() < 1e-14);
        let na = nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix();
        assert!((na.matrix() - r).norm() < 1e-14);
    }

    #[test]
    fn pitch_up_points_nose_skyward() {
        let mut s = with_q(quaternion_from_euler(0.0, 0.3, 0.0));
        s.velocity = Vector3::new(1.0, 0.0, 0.0);
        let w = s.velocity_world();
        assert!(w.z > 0.0 && w.x > 0.0);
    }

    #[test]
    fn vec_round_trip() {
        let mut s = with_q(quaternion_from_euler(0.1, 0.2, 0.3));
        s.position = Vector3::new(1.0, 2.0, 3.0);
        s.velocity = Vector3::new(4.0, 5.0, 6.0);
        s.rates = Vector3::new(7.0, 8.0, 9.0);
        assert_eq!(SimState::from_vec(0.0, &s.to_vec()), s);
    }
}
