//! Exact point-to-mesh distances with a BVH accelerator.

use super::{TriangleMesh, Vec3};

/// Closest point on a triangle to `p` (Ericson's region classification).
pub fn closest_point_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

#[derive(Debug, Clone, Copy)]
struct Aabb {
    min: Vec3,
    max: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            min: Vec3::from_element(f64::INFINITY),
            max: Vec3::from_element(f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    fn dist_sq(&self, p: &Vec3) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            let v = p[i];
            if v < self.min[i] {
                d += (self.min[i] - v) * (self.min[i] - v);
            } else if v > self.max[i] {
                d += (v - self.max[i]) * (v - self.max[i]);
            }
        }
        d
    }
}

enum Node {
    Leaf {
        bounds: Aabb,
        triangles: Vec<u32>,
    },
    Inner {
        bounds: Aabb,
        left: usize,
        right: usize,
    },
}

/// BVH over a triangle mesh answering exact closest-distance queries.
pub struct MeshDistanceIndex {
    mesh: TriangleMesh,
    nodes: Vec<Node>,
    root: usize,
}

const LEAF_SIZE: usize = 8;

impl MeshDistanceIndex {
    pub fn build(mesh: TriangleMesh) -> Self {
        assert!(!mesh.triangles.is_empty(), "distance index needs triangles");
        let centroids: Vec<Vec3> = (0..mesh.triangles.len())
            .map(|i| {
                let [a, b, c] = mesh.triangle_vertices(i);
                (a + b + c) / 3.0
            })
            .collect();
        let mut nodes = Vec::new();
        let mut ids: Vec<u32> = (0..mesh.triangles.len() as u32).collect();
        let root = Self::build_node(&mesh, &centroids, &mut ids, &mut nodes);
        MeshDistanceIndex { mesh, nodes, root }
    }

    fn node_bounds(mesh: &TriangleMesh, ids: &[u32]) -> Aabb {
        let mut b = Aabb::empty();
        for &t in ids {
            for v in mesh.triangle_vertices(t as usize) {
                b.grow(&v);
            }
        }
        b
    }

    fn build_node(
        mesh: &TriangleMesh,
        centroids: &[Vec3],
        ids: &mut [u32],
        nodes: &mut Vec<Node>,
    ) -> usize {
        let bounds = Self::node_bounds(mesh, ids);
        if ids.len() <= LEAF_SIZE {
            nodes.push(Node::Leaf {
                bounds,
                triangles: ids.to_vec(),
            });
            return nodes.len() - 1;
        }
        // Median split along the widest centroid axis.
        let mut cmin = Vec3::from_element(f64::INFINITY);
        let mut cmax = Vec3::from_element(f64::NEG_INFINITY);
        for &t in ids.iter() {
            cmin = cmin.inf(&centroids[t as usize]);
            cmax = cmax.sup(&centroids[t as usize]);
        }
        let widths = cmax - cmin;
        let axis = if widths.x >= widths.y && widths.x >= widths.z {
            0
        } else if widths.y >= widths.z {
            1
        } else {
            2
        };
        let mid = ids.len() / 2;
        ids.select_nth_unstable_by(mid, |&x, &y| {
            centroids[x as usize][axis]
                .partial_cmp(&centroids[y as usize][axis])
                .unwrap()
        });
        let (lo, hi) = ids.split_at_mut(mid);
        let left = Self::build_node(mesh, centroids, lo, nodes);
        let right = Self::build_node(mesh, centroids, hi, nodes);
        nodes.push(Node::Inner {
            bounds,
            left,
            right,
        });
        nodes.len() - 1
    }

    /// Exact squared distance from `p` to the mesh surface.
    pub fn distance_sq(&self, p: &Vec3) -> f64 {
        let mut best = f64::INFINITY;
        self.query(self.root, p, &mut best);
        best
    }

    fn query(&self, node: usize, p: &Vec3, best: &mut f64) {
        match &self.nodes[node] {
            Node::Leaf { triangles, .. } => {
                for &t in triangles {
                    let [a, b, c] = self.mesh.triangle_vertices(t as usize);
                    let q = closest_point_on_triangle(p, &a, &b, &c);
                    let d = (p - q).norm_squared();
                    if d < *best {
                        *best = d;
                    }
                }
            }
            Node::Inner { left, right, .. } => {
                let (bl, br) = (self.bounds_of(*left), self.bounds_of(*right));
                let (dl, dr) = (bl.dist_sq(p), br.dist_sq(p));
                let (near, far, dn, df) = if dl <= dr {
                    (*left, *right, dl, dr)
                } else {
                    (*right, *left, dr, dl)
                };
                if dn < *best {
                    self.query(near, p, best);
                }
                if df < *best {
                    self.query(far, p, best);
                }
            }
        }
    }

    fn bounds_of(&self, node: usize) -> &Aabb {
        match &self.nodes[node] {
            Node::Leaf { bounds, .. } => bounds,
            Node::Inner { bounds, .. } => bounds,
        }
    }

    /// Root-mean-square distance from each point to the mesh surface.
    pub fn rms(&self, points: &[Vec3]) -> f64 {
        assert!(!points.is_empty());
        let sum: f64 = points.iter().map(|p| self.distance_sq(p)).sum();
        (sum / points.len() as f64).sqrt()
    }
}

/// Root-mean-square distance from `points` to the surface of `cad`.
pub fn mesh_to_cad_rms(points: &[Vec3], cad: &TriangleMesh) -> f64 {
    let index = MeshDistanceIndex::build(cad.clone());
    index.rms(points)
}

/// Brute-force oracle: scans every triangle for every point.
pub fn brute_force_rms(points: &[Vec3], cad: &TriangleMesh) -> f64 {
    assert!(!points.is_empty() && !cad.triangles.is_empty());
    let sum: f64 = points
        .iter()
        .map(|p| {
            (0..cad.triangles.len())
                .map(|i| {
                    let [a, b, c] = cad.triangle_vertices(i);
                    (p - closest_point_on_triangle(p, &a, &b, &c)).norm_squared()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    (sum / points.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::convex_hull_3d;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn cube_mesh(half: f64) -> TriangleMesh {
        let mut verts = Vec::new();
        for &x in &[-half, half] {
            for &y in &[-half, half] {
                for &z in &[-half, half] {
                    verts.push(Vec3::new(x, y, z));
                }
            }
        }
        convex_hull_3d(&verts).to_mesh()
    }

    #[test]
    fn on_surface_points_have_zero_rms() {
        let cube = cube_mesh(0.5);
        let pts = cube.sample_surface(0.21);
        assert_relative_eq!(mesh_to_cad_rms(&pts, &cube), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_point_distance_to_plane() {
        let quad = TriangleMesh::new(
            vec![
                Vec3::new(-5.0, -5.0, 0.0),
                Vec3::new(5.0, -5.0, 0.0),
                Vec3::new(5.0, 5.0, 0.0),
                Vec3::new(-5.0, 5.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let d = mesh_to_cad_rms(&[Vec3::new(0.3, -0.2, 0.3)], &quad);
        assert_relative_eq!(d, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn bvh_matches_brute_force_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let cad = cube_mesh(0.55);
        let pts: Vec<Vec3> = (0..1000)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect();
        let fast = mesh_to_cad_rms(&pts, &cad);
        let slow = brute_force_rms(&pts, &cad);
        assert_eq!(fast, slow);
    }

    #[test]
    fn scaled_cube_rms_matches_oracle() {
        let cube = cube_mesh(0.5);
        let scaled = cube.scaled(1.1);
        let pts = cube.sample_surface(0.05);
        assert_eq!(mesh_to_cad_rms(&pts, &scaled), brute_force_rms(&pts, &scaled));
    }
}
