//! Penetration tests between convex hulls.
//!
//! Separating-axis test over both hulls' face normals plus (for small
//! hulls) edge-pair cross products. The reported depth is the minimum
//! overlap across the tested axes: exact for box-like shapes, a
//! conservative upper bound otherwise. Touching surfaces (zero-depth
//! contact) never count as penetration.

use super::{convex_hull_3d, ConvexHull, TriangleMesh, Vec3};

/// Above this many edge-direction pairs the edge-cross axes are skipped
/// and only face normals are tested.
const EDGE_CROSS_BUDGET: usize = 4096;

/// Penetration depth estimate between two convex hulls. Non-positive
/// values mean the hulls are separated (or touching) along some axis.
pub fn hulls_penetration_depth(a: &ConvexHull, b: &ConvexHull) -> f64 {
    let mut best = f64::INFINITY;
    let mut consider = |axis: &Vec3| -> bool {
        let (a_lo, a_hi) = a.interval(axis);
        let (b_lo, b_hi) = b.interval(axis);
        let overlap = a_hi.min(b_hi) - a_lo.max(b_lo);
        if overlap < best {
            best = overlap;
        }
        best > 0.0
    };

    for n in &a.face_normals {
        if !consider(n) {
            return best;
        }
    }
    for n in &b.face_normals {
        if !consider(n) {
            return best;
        }
    }

    let ea = a.edge_directions();
    let eb = b.edge_directions();
    if ea.len() * eb.len() <= EDGE_CROSS_BUDGET {
        for da in &ea {
            for db in &eb {
                let cross = da.cross(db);
                let n = cross.norm();
                if n < 1e-9 {
                    continue;
                }
                if !consider(&(cross / n)) {
                    return best;
                }
            }
        }
    }
    best
}

/// Maximum pairwise penetration depth between two sets of convex pieces.
pub fn penetration_depth_multi(a: &[ConvexHull], b: &[ConvexHull]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for ha in a {
        for hb in b {
            worst = worst.max(hulls_penetration_depth(ha, hb));
        }
    }
    worst
}

/// Whether two meshes' convex hulls interpenetrate deeper than `tol`.
///
/// Segmented scan meshes are open, so both inputs are reduced to their
/// convex hulls before testing.
pub fn meshes_penetrate(a: &TriangleMesh, b: &TriangleMesh, tol: f64) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let ha = convex_hull_3d(&a.vertices);
    let hb = convex_hull_3d(&b.vertices);
    hulls_penetration_depth(&ha, &hb) > tol
}
