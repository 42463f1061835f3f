//! Gravity-aligned oriented bounding boxes.
//!
//! Boxes are parameterized by center position, a single yaw angle about the
//! up axis, and full extents. The fitting routine minimizes footprint area
//! over yaw with rotating calipers on the ground-projection convex hull.

use serde::{Deserialize, Serialize};

use super::polygon::{self, Vec2};
use super::{Mat3, TriangleMesh, Vec3, MIN_EXTENT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedBox {
    /// Box center `p`.
    pub center: Vec3,
    /// Yaw about the up axis, radians, normalized to `[0, pi/2)` by fitting.
    pub yaw: f64,
    /// Full extents `s`, all strictly positive.
    pub size: Vec3,
}

impl OrientedBox {
    pub fn new(center: Vec3, yaw: f64, size: Vec3) -> Self {
        OrientedBox {
            center,
            yaw,
            size: Vec3::new(
                size.x.max(MIN_EXTENT),
                size.y.max(MIN_EXTENT),
                size.z.max(MIN_EXTENT),
            ),
        }
    }

    pub fn bottom(&self) -> f64 {
        self.center.z - self.size.z * 0.5
    }

    pub fn top(&self) -> f64 {
        self.center.z + self.size.z * 0.5
    }

    pub fn footprint_area(&self) -> f64 {
        self.size.x * self.size.y
    }

    pub fn volume(&self) -> f64 {
        self.size.x * self.size.y * self.size.z
    }

    /// Ground-plane rectangle corners in CCW order.
    pub fn footprint_corners(&self) -> [Vec2; 4] {
        let (s, c) = self.yaw.sin_cos();
        let ux = Vec2::new(c, s);
        let uy = Vec2::new(-s, c);
        let ctr = Vec2::new(self.center.x, self.center.y);
        let hx = self.size.x * 0.5;
        let hy = self.size.y * 0.5;
        [
            ctr - ux * hx - uy * hy,
            ctr + ux * hx - uy * hy,
            ctr + ux * hx + uy * hy,
            ctr - ux * hx + uy * hy,
        ]
    }

    /// Projects a world point into the box's ground frame (center at the
    /// origin, yaw removed).
    pub fn to_footprint_frame(&self, p: &Vec3) -> Vec2 {
        let (s, c) = self.yaw.sin_cos();
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        Vec2::new(c * dx + s * dy, -s * dx + c * dy)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let f = self.to_footprint_frame(p);
        f.x.abs() <= self.size.x * 0.5 + 1e-9
            && f.y.abs() <= self.size.y * 0.5 + 1e-9
            && (p.z - self.center.z).abs() <= self.size.z * 0.5 + 1e-9
    }

    /// Corners of the box in world coordinates.
    pub fn corners(&self) -> [Vec3; 8] {
        let fp = self.footprint_corners();
        let mut out = [Vec3::zeros(); 8];
        for (i, c) in fp.iter().enumerate() {
            out[i] = Vec3::new(c.x, c.y, self.bottom());
            out[i + 4] = Vec3::new(c.x, c.y, self.top());
        }
        out
    }

    /// Intersection-over-union with another gravity-aligned box.
    pub fn iou(&self, other: &OrientedBox) -> f64 {
        let inter = boxes_overlap_volume(self, other);
        let union = self.volume() + other.volume() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

/// Area of the intersection of the two ground-plane rectangles.
pub fn footprint_overlap_area(a: &OrientedBox, b: &OrientedBox) -> f64 {
    polygon::intersection_area(&a.footprint_corners(), &b.footprint_corners())
}

/// Overlap volume of two gravity-aligned boxes: footprint overlap area
/// times the vertical interval overlap. Touching boxes overlap by zero.
pub fn boxes_overlap_volume(a: &OrientedBox, b: &OrientedBox) -> f64 {
    let dz = a.top().min(b.top()) - a.bottom().max(b.bottom());
    if dz <= 0.0 {
        return 0.0;
    }
    footprint_overlap_area(a, b) * dz
}

/// Fits the minimum-footprint gravity-aligned box around a vertex set.
///
/// The vertical extent spans the z range; the yaw minimizing footprint area
/// is found with rotating calipers over the 2D convex hull. Degenerate
/// (flat or collinear) inputs get extents floored at [`MIN_EXTENT`].
pub fn fit_oriented_box_points(points: &[Vec3]) -> OrientedBox {
    assert!(!points.is_empty(), "cannot fit a box to no points");
    let mut zmin = f64::INFINITY;
    let mut zmax = f64::NEG_INFINITY;
    let mut flat: Vec<Vec2> = Vec::with_capacity(points.len());
    for p in points {
        zmin = zmin.min(p.z);
        zmax = zmax.max(p.z);
        flat.push(Vec2::new(p.x, p.y));
    }
    let hull = super::hull::convex_hull_2d(&flat);
    let (yaw, min2, max2) = min_area_rect(&hull, &flat);
    let (s, c) = yaw.sin_cos();
    let ctr2 = (min2 + max2) * 0.5;
    let center = Vec3::new(
        c * ctr2.x - s * ctr2.y,
        s * ctr2.x + c * ctr2.y,
        (zmin + zmax) * 0.5,
    );
    OrientedBox::new(
        center,
        yaw,
        Vec3::new(max2.x - min2.x, max2.y - min2.y, zmax - zmin),
    )
}

/// [`fit_oriented_box_points`] over a mesh's vertices. The gravity vector
/// must be the world convention `(0, 0, -1)`.
pub fn fit_oriented_box(mesh: &TriangleMesh, gravity: &Vec3) -> OrientedBox {
    debug_assert!(
        (gravity - super::GRAVITY).norm() < 1e-9,
        "scenes must be gravity-aligned with +z up"
    );
    fit_oriented_box_points(&mesh.vertices)
}

/// Returns `(yaw in [0, pi/2), min corner, max corner)` of the minimum-area
/// rectangle; corners are in the rotated frame where `R(-yaw)` maps world
/// to frame.
fn min_area_rect(hull: &[Vec2], all: &[Vec2]) -> (f64, Vec2, Vec2) {
    let extents = |yaw: f64| -> (Vec2, Vec2) {
        let (s, c) = yaw.sin_cos();
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in all {
            let u = c * p.x + s * p.y;
            let v = -s * p.x + c * p.y;
            min.x = min.x.min(u);
            min.y = min.y.min(v);
            max.x = max.x.max(u);
            max.y = max.y.max(v);
        }
        (min, max)
    };

    let mut candidates: Vec<f64> = Vec::new();
    if hull.len() >= 2 {
        for i in 0..hull.len() {
            let a = hull[i];
            let b = hull[(i + 1) % hull.len()];
            let d = b - a;
            if d.norm() > 1e-12 {
                candidates.push(d.y.atan2(d.x).rem_euclid(std::f64::consts::FRAC_PI_2));
            }
        }
    }
    if candidates.is_empty() {
        candidates.push(0.0);
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut best_yaw = candidates[0];
    let mut best_area = f64::INFINITY;
    let mut best = extents(best_yaw);
    for &yaw in &candidates {
        let (min, max) = extents(yaw);
        let area = (max.x - min.x).max(MIN_EXTENT) * (max.y - min.y).max(MIN_EXTENT);
        // Strictly-better keeps the smallest qualifying yaw on ties.
        if area < best_area - 1e-15 {
            best_area = area;
            best_yaw = yaw;
            best = (min, max);
        }
    }
    (best_yaw, best.0, best.1)
}

pub(crate) fn rot_x(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub(crate) fn rot_y(a: f64) -> Mat3 {
    let (s, c) = a.sin_cos();
    Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}
