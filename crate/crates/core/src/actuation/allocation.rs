//! Physical allocation of thrust and body moments to blade deflections.

use nalgebra::{Matrix4, Vector4};

use super::ActuatorError;
use crate::env::VehicleParams;

/// Linear map from the four blade deflections to `(T, L, M, N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocator {
    forward: Matrix4<f64>,
    inverse: Matrix4<f64>,
}

impl Allocator {
    pub fn new(params: &VehicleParams) -> Result<Self, ActuatorError> {
        Self::with_gains(params.thrust_gain(), params.dragtorque_gain(), params.arm_x(), params.arm_y())
    }

    pub fn with_gains(kt: f64, kd: f64, lx: f64, ly: f64) -> Result<Self, ActuatorError> {
        #[rustfmt::skip]
        let forward = Matrix4::new(
            kt,       kt,       kt,       kt,
            -kt * ly, -kt * ly, kt * ly,  kt * ly,
            kt * lx,  -kt * lx, -kt * lx, kt * lx,
            kd,       -kd,      kd,       -kd,
        );
        let inverse = forward
            .try_inverse()
            .filter(|m| m.iter().all(|x| x.is_finite()))
            .ok_or(ActuatorError::SingularAllocation)?;
        Ok(Self { forward, inverse })
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.forward
    }

    pub fn forward(&self, deflections: [f64; 4]) -> Vector4<f64> {
        self.forward * Vector4::from(deflections)
    }

    pub fn allocate(&self, thrust: f64, roll: f64, pitch: f64, yaw: f64) -> [f64; 4] {
        (self.inverse * Vector4::new(thrust, roll, pitch, yaw)).into()
    }
}
