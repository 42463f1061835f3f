//! Yaw-constrained similarity transforms and rigid poses.

use serde::{Deserialize, Serialize};

use super::{Mat3, Vec3};
use crate::error::{Error, Result};

/// Similarity transform `x' = scale * Rz(yaw) * x + translation`.
///
/// Roll and pitch are fixed by the gravity-aligned assumption; the scale
/// is uniform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimTransform {
    pub scale: f64,
    pub yaw: f64,
    pub translation: Vec3,
}

impl SimTransform {
    pub fn identity() -> Self {
        SimTransform {
            scale: 1.0,
            yaw: 0.0,
            translation: Vec3::zeros(),
        }
    }

    pub fn new(scale: f64, yaw: f64, translation: Vec3) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidTransform(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(SimTransform {
            scale,
            yaw,
            translation,
        })
    }

    pub fn rotation(&self) -> Mat3 {
        rot_z(self.yaw)
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.scale * (self.rotation() * p) + self.translation
    }

    /// Composition: `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &SimTransform) -> SimTransform {
        SimTransform {
            scale: self.scale * other.scale,
            yaw: self.yaw + other.yaw,
            translation: self.scale * (self.rotation() * other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> SimTransform {
        let inv_scale = 1.0 / self.scale;
        let inv_rot = rot_z(-self.yaw);
        SimTransform {
            scale: inv_scale,
            yaw: -self.yaw,
            translation: -inv_scale * (inv_rot * self.translation),
        }
    }
}

/// Rigid pose (rotation + translation), used for joint origins and link
/// frames during export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: Mat3,
    pub translation: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Mat3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: Mat3, translation: Vec3) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn from_yaw(yaw: f64, translation: Vec3) -> Self {
        Pose {
            rotation: rot_z(yaw),
            translation,
        }
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// Fixed-axis XYZ (roll, pitch, yaw) angles, the URDF `rpy` convention
    /// `R = Rz(yaw) * Ry(pitch) * Rx(roll)`.
    pub fn rpy(&self) -> (f64, f64, f64) {
        let r = &self.rotation;
        let sy = -r[(2, 0)];
        let pitch = sy.clamp(-1.0, 1.0).asin();
        if sy.abs() > 1.0 - 1e-12 {
            // Gimbal lock: fold everything into roll.
            let roll = r[(0, 1)].atan2(r[(1, 1)]) * sy.signum();
            (roll, pitch, 0.0)
        } else {
            let roll = r[(2, 1)].atan2(r[(2, 2)]);
            let yaw = r[(1, 0)].atan2(r[(0, 0)]);
            (roll, pitch, yaw)
        }
    }
}

pub(crate) fn rot_z(yaw: f64) -> Mat3 {
    let (s, c) = yaw.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}
