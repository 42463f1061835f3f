//! Geometric primitives and predicates shared by every pipeline stage.
//!
//! Conventions used throughout the crate:
//!
//! * World `+z` is up; the gravity direction is the unit vector
//!   `(0, 0, -1)` ([`GRAVITY`]).
//! * "Gravity-aligned" boxes have their third axis equal to `+z`; their
//!   free orientation is a single yaw angle about `z`.
//! * Planes are homogeneous `[n, d]` with unit normal `n`, and a point `v`
//!   lies on the plane iff `n · v + d = 0`.

mod distance;
mod hull;
mod mesh;
mod obb;
mod penetration;
mod plane;
mod polygon;
mod ransac;
mod transform;

pub use distance::{brute_force_rms, mesh_to_cad_rms, MeshDistanceIndex};
pub use hull::{convex_hull_2d, convex_hull_3d, ConvexHull};
pub use mesh::TriangleMesh;
pub use obb::{
    boxes_overlap_volume, fit_oriented_box, fit_oriented_box_points, footprint_overlap_area,
    OrientedBox,
};
pub use penetration::{hulls_penetration_depth, meshes_penetrate, penetration_depth_multi};
pub use plane::SurfacePlane;
pub use polygon::{clip_convex, polygon_area, Rect2};
pub use ransac::{extract_planes, extract_planes_from_points, PlaneExtractParams};
pub use transform::{Pose, SimTransform};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Unit vector along the gravity direction (world `+z` is up).
pub const GRAVITY: Vec3 = Vec3::new(0.0, 0.0, -1.0);

/// Minimum box extent; flat axes are floored to this value.
pub const MIN_EXTENT: f64 = 1e-6;
