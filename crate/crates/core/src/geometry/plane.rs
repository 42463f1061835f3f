//! Homogeneous surface planes `[n, d]` with `n · v + d = 0`.

use serde::{Deserialize, Serialize};

use super::{OrientedBox, SimTransform, Vec3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePlane {
    /// Unit normal.
    pub normal: Vec3,
    /// Offset `d`; a point `v` on the plane satisfies `n · v + d = 0`.
    pub offset: f64,
}

impl SurfacePlane {
    pub fn new(normal: Vec3, offset: f64) -> Self {
        let n = normal.norm();
        debug_assert!(n > 0.0, "plane normal must be nonzero");
        SurfacePlane {
            normal: normal / n,
            offset: offset / n,
        }
    }

    /// Plane through `point` with the given normal direction.
    pub fn from_point_normal(point: &Vec3, normal: &Vec3) -> Self {
        let n = normal.normalize();
        SurfacePlane {
            normal: n,
            offset: -n.dot(point),
        }
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) + self.offset
    }

    /// Height of the plane along the up axis, `-d`, meaningful for
    /// near-horizontal planes.
    pub fn height(&self) -> f64 {
        -self.offset
    }

    /// Whether the plane can support objects resting on it: its normal must
    /// oppose gravity within the tolerance `a_th` (`n · g <= a_th`).
    pub fn is_supporting(&self, gravity: &Vec3, a_th: f64) -> bool {
        self.normal.dot(gravity) <= a_th
    }

    /// Image of the plane under `t`: the returned plane contains exactly
    /// the transformed incidence set of `self`.
    pub fn transformed(&self, t: &SimTransform) -> Result<SurfacePlane> {
        if !(t.scale > 0.0) || !t.scale.is_finite() {
            return Err(Error::InvalidTransform(format!(
                "plane transform requires positive scale, got {}",
                t.scale
            )));
        }
        // x' = aRx + p maps (n, d) to (Rn, a*d - (Rn)·p) after renormalizing.
        let n = t.rotation() * self.normal;
        let d = t.scale * self.offset - n.dot(&t.translation);
        Ok(SurfacePlane { normal: n, offset: d })
    }

    /// The plane expressed in the local frame of a gravity-aligned box
    /// (origin at the box center, yaw removed).
    pub fn in_box_frame(&self, b: &OrientedBox) -> SurfacePlane {
        let rot = super::transform::rot_z(-b.yaw);
        let n = rot * self.normal;
        let d = self.offset + self.normal.dot(&b.center);
        SurfacePlane { normal: n, offset: d }
    }
}
