//! Convex hulls in 2D (monotone chain) and 3D (quickhull).

use std::collections::HashMap;

use super::polygon::Vec2;
use super::{TriangleMesh, Vec3};

/// CCW convex hull of a 2D point set; collinear interior points are
/// dropped. Degenerate inputs return fewer than 3 points.
pub fn convex_hull_2d(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Vec2, a: Vec2, b: Vec2| (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    let chain = |iter: &mut dyn Iterator<Item = Vec2>| {
        let mut hull: Vec<Vec2> = Vec::new();
        for p in iter {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
        hull
    };
    let mut lower = chain(&mut pts.iter().cloned());
    let upper = chain(&mut pts.iter().rev().cloned());
    lower.extend(upper);
    if lower.len() < 3 {
        // Collinear input collapses to its extreme segment.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    lower
}

/// Convex polytope: hull vertices, triangulated faces, and face planes
/// (`normal · x = offset`, normals outward).
#[derive(Debug, Clone)]
pub struct ConvexHull {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[u32; 3]>,
    pub face_normals: Vec<Vec3>,
    pub face_offsets: Vec<f64>,
}

impl ConvexHull {
    pub fn support(&self, dir: &Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(dir))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn interval(&self, dir: &Vec3) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in &self.vertices {
            let d = v.dot(dir);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }

    /// Unique (up to sign) edge directions, deduplicated by angle.
    pub fn edge_directions(&self) -> Vec<Vec3> {
        let mut dirs: Vec<Vec3> = Vec::new();
        for f in &self.faces {
            for k in 0..3 {
                let a = self.vertices[f[k] as usize];
                let b = self.vertices[f[(k + 1) % 3] as usize];
                let mut d = b - a;
                let n = d.norm();
                if n < 1e-12 {
                    continue;
                }
                d /= n;
                if d.z < 0.0 || (d.z == 0.0 && (d.y < 0.0 || (d.y == 0.0 && d.x < 0.0))) {
                    d = -d;
                }
                if !dirs.iter().any(|e| (e - d).norm() < 1e-9) {
                    dirs.push(d);
                }
            }
        }
        dirs
    }

    pub fn to_mesh(&self) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.clone(),
            triangles: self.faces.clone(),
        }
    }

    pub fn transformed(&self, t: &super::SimTransform) -> ConvexHull {
        let vertices: Vec<Vec3> = self.vertices.iter().map(|v| t.apply(v)).collect();
        let rot = t.rotation();
        let mut face_normals = Vec::with_capacity(self.face_normals.len());
        let mut face_offsets = Vec::with_capacity(self.face_normals.len());
        for (i, n) in self.face_normals.iter().enumerate() {
            let n2 = rot * n;
            face_normals.push(n2);
            let v0 = vertices[self.faces[i][0] as usize];
            face_offsets.push(n2.dot(&v0));
        }
        ConvexHull {
            vertices,
            faces: self.faces.clone(),
            face_normals,
            face_offsets,
        }
    }
}

const DEGENERACY_PAD: f64 = 1e-6;

/// Quickhull. Degenerate inputs (coplanar, collinear, single point) are
/// padded to a thin full-dimensional set so downstream face-normal queries
/// stay meaningful.
pub fn convex_hull_3d(points: &[Vec3]) -> ConvexHull {
    assert!(!points.is_empty(), "hull of empty point set");
    match quickhull(points) {
        Some(h) => h,
        None => {
            let padded = pad_degenerate(points);
            quickhull(&padded).expect("padded point set is full-dimensional")
        }
    }
}

fn pad_degenerate(points: &[Vec3]) -> Vec<Vec3> {
    let centroid = points.iter().sum::<Vec3>() / points.len() as f64;
    let mut cov = nalgebra::Matrix3::<f64>::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut out = points.to_vec();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    for i in 0..3 {
        if eig.eigenvalues[i] <= max_ev * 1e-12 + 1e-18 {
            let axis: Vec3 = eig.eigenvectors.column(i).into();
            out.push(centroid + axis * DEGENERACY_PAD);
            out.push(centroid - axis * DEGENERACY_PAD);
        }
    }
    out
}

struct Face {
    verts: [u32; 3],
    normal: Vec3,
    offset: f64,
    outside: Vec<u32>,
    alive: bool,
}

fn make_face(points: &[Vec3], a: u32, b: u32, c: u32, interior: &Vec3) -> Option<Face> {
    let pa = points[a as usize];
    let n = (points[b as usize] - pa).cross(&(points[c as usize] - pa));
    let len = n.norm();
    if len < 1e-15 {
        return None;
    }
    let mut n = n / len;
    let mut verts = [a, b, c];
    if n.dot(&(interior - pa)) > 0.0 {
        n = -n;
        verts = [a, c, b];
    }
    Some(Face {
        verts,
        normal: n,
        offset: n.dot(&pa),
        outside: Vec::new(),
        alive: true,
    })
}

fn quickhull(points: &[Vec3]) -> Option<ConvexHull> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let mut lo = Vec3::from_element(f64::INFINITY);
    let mut hi = Vec3::from_element(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let scale = (hi - lo).norm().max(1e-9);
    let eps = scale * 1e-10;

    // Initial simplex: farthest axis-extreme pair, then farthest from the
    // line, then farthest from the plane.
    let mut extremes = [0usize; 6];
    for (axis, pair) in [(0usize, 0usize), (1, 2), (2, 4)] {
        let mut imin = 0;
        let mut imax = 0;
        for (i, p) in points.iter().enumerate() {
            if p[axis] < points[imin][axis] {
                imin = i;
            }
            if p[axis] > points[imax][axis] {
                imax = i;
            }
        }
        extremes[pair] = imin;
        extremes[pair + 1] = imax;
    }
    let (mut e0, mut e1, mut best_d) = (extremes[0], extremes[1], -1.0);
    for &i in &extremes {
        for &j in &extremes {
            let d = (points[i] - points[j]).norm();
            if d > best_d {
                best_d = d;
                e0 = i;
                e1 = j;
            }
        }
    }
    if best_d < eps {
        return None;
    }
    let dir = (points[e1] - points[e0]).normalize();
    let (mut e2, mut best_d) = (0usize, -1.0);
    for (i, p) in points.iter().enumerate() {
        let v = p - points[e0];
        let d = (v - dir * v.dot(&dir)).norm();
        if d > best_d {
            best_d = d;
            e2 = i;
        }
    }
    if best_d < eps {
        return None;
    }
    let pn = (points[e1] - points[e0])
        .cross(&(points[e2] - points[e0]))
        .normalize();
    let (mut e3, mut best_d) = (0usize, -1.0);
    for (i, p) in points.iter().enumerate() {
        let d = pn.dot(&(p - points[e0])).abs();
        if d > best_d {
            best_d = d;
            e3 = i;
        }
    }
    if best_d < eps {
        return None;
    }

    let interior = (points[e0] + points[e1] + points[e2] + points[e3]) / 4.0;
    let (a, b, c, d) = (e0 as u32, e1 as u32, e2 as u32, e3 as u32);
    let mut faces: Vec<Face> = Vec::new();
    for tri in [[a, b, c], [a, b, d], [a, c, d], [b, c, d]] {
        faces.push(make_face(points, tri[0], tri[1], tri[2], &interior)?);
    }

    // Assign candidate points to face outside sets.
    for (i, p) in points.iter().enumerate() {
        let i = i as u32;
        if i == a || i == b || i == c || i == d {
            continue;
        }
        for f in faces.iter_mut() {
            if f.normal.dot(p) - f.offset > eps {
                f.outside.push(i);
                break;
            }
        }
    }

    let mut adjacency: HashMap<(u32, u32), usize> = HashMap::new();
    let register = |adj: &mut HashMap<(u32, u32), usize>, f: &Face, idx: usize| {
        for k in 0..3 {
            adj.insert((f.verts[k], f.verts[(k + 1) % 3]), idx);
        }
    };
    for (i, f) in faces.iter().enumerate() {
        register(&mut adjacency, f, i);
    }

    let mut guard = 0usize;
    loop {
        guard += 1;
        if guard > 16 * n + 64 {
            break; // numerical stalemate; current hull is a sound approximation
        }
        let Some(fi) = faces.iter().position(|f| f.alive && !f.outside.is_empty()) else {
            break;
        };
        let apex = *faces[fi]
            .outside
            .iter()
            .max_by(|&&x, &&y| {
                let dx = faces[fi].normal.dot(&points[x as usize]);
                let dy = faces[fi].normal.dot(&points[y as usize]);
                dx.partial_cmp(&dy).unwrap()
            })
            .unwrap();
        let apex_p = points[apex as usize];

        // Visible faces via flood fill across adjacency.
        let mut visible = vec![false; faces.len()];
        let mut stack = vec![fi];
        visible[fi] = true;
        let mut horizon: Vec<(u32, u32)> = Vec::new();
        while let Some(cur) = stack.pop() {
            let verts = faces[cur].verts;
            for k in 0..3 {
                let edge = (verts[k], verts[(k + 1) % 3]);
                let Some(&nb) = adjacency.get(&(edge.1, edge.0)) else {
                    continue;
                };
                if visible[nb] || !faces[nb].alive {
                    continue;
                }
                if faces[nb].normal.dot(&apex_p) - faces[nb].offset > eps {
                    visible[nb] = true;
                    stack.push(nb);
                } else {
                    horizon.push(edge);
                }
            }
        }

        let mut orphans: Vec<u32> = Vec::new();
        for (i, f) in faces.iter_mut().enumerate() {
            if visible[i] {
                f.alive = false;
                orphans.append(&mut f.outside);
                for k in 0..3 {
                    adjacency.remove(&(f.verts[k], f.verts[(k + 1) % 3]));
                }
            }
        }

        let mut new_ids = Vec::with_capacity(horizon.len());
        for (ea, eb) in horizon {
            if let Some(face) = make_face(points, ea, eb, apex, &interior) {
                let idx = faces.len();
                register(&mut adjacency, &face, idx);
                faces.push(face);
                new_ids.push(idx);
            }
        }
        for o in orphans {
            if o == apex {
                continue;
            }
            let p = &points[o as usize];
            for &ni in &new_ids {
                if faces[ni].normal.dot(p) - faces[ni].offset > eps {
                    faces[ni].outside.push(o);
                    break;
                }
            }
        }
    }

    // Compact to used vertices.
    let mut remap: HashMap<u32, u32> = HashMap::new();
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut out_faces = Vec::new();
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    for f in faces.iter().filter(|f| f.alive) {
        let mut tri = [0u32; 3];
        for (k, &v) in f.verts.iter().enumerate() {
            let id = *remap.entry(v).or_insert_with(|| {
                vertices.push(points[v as usize]);
                (vertices.len() - 1) as u32
            });
            tri[k] = id;
        }
        out_faces.push(tri);
        normals.push(f.normal);
        offsets.push(f.offset);
    }
    Some(ConvexHull {
        vertices,
        faces: out_faces,
        face_normals: normals,
        face_offsets: offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hull_2d_of_square_with_interior_points() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.5),
            Vec2::new(0.2, 0.8),
        ];
        let hull = convex_hull_2d(&pts);
        assert_eq!(hull.len(), 4);
    }

    #[test]
    fn hull_3d_of_cube_cloud() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let mut pts: Vec<Vec3> = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push(Vec3::new(x, y, z));
                }
            }
        }
        for _ in 0..500 {
            pts.push(Vec3::new(
                rng.random_range(-0.99..0.99),
                rng.random_range(-0.99..0.99),
                rng.random_range(-0.99..0.99),
            ));
        }
        let hull = convex_hull_3d(&pts);
        assert_eq!(hull.vertices.len(), 8);
        assert_eq!(hull.faces.len(), 12);
        // All input points inside or on the hull.
        for p in &pts {
            for (n, o) in hull.face_normals.iter().zip(&hull.face_offsets) {
                assert!(n.dot(p) - o < 1e-9);
            }
        }
        assert_relative_eq!(hull.support(&Vec3::new(1.0, 0.0, 0.0)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hull_3d_random_cloud_contains_all_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let pts: Vec<Vec3> = (0..300)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-2.0..0.5),
                    rng.random_range(0.0..3.0),
                )
            })
            .collect();
        let hull = convex_hull_3d(&pts);
        for p in &pts {
            for (n, o) in hull.face_normals.iter().zip(&hull.face_offsets) {
                assert!(n.dot(p) - o < 1e-8, "point escapes hull by {}", n.dot(p) - o);
            }
        }
        assert!(hull.to_mesh().is_watertight());
    }

    #[test]
    fn flat_input_padded_to_slab() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(2.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let hull = convex_hull_3d(&pts);
        let (lo, hi) = hull.interval(&Vec3::new(0.0, 0.0, 1.0));
        assert!(hi - lo > 0.0 && hi - lo < 1e-4);
        let (lo, hi) = hull.interval(&Vec3::new(1.0, 0.0, 0.0));
        assert_relative_eq!(hi - lo, 2.0, epsilon = 1e-9);
    }
}
