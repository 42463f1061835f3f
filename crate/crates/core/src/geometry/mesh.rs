//! Triangle meshes: positions plus index triples.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::{Pose, SimTransform, Vec3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    /// Builds a mesh, dropping degenerate (zero-area) triangles and
    /// rejecting out-of-range indices.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let n = vertices.len() as u32;
        let mut kept = Vec::with_capacity(triangles.len());
        for t in triangles {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::EmptyMesh(format!(
                    "triangle index {:?} out of range ({} vertices)",
                    t, n
                )));
            }
            let a = vertices[t[0] as usize];
            let b = vertices[t[1] as usize];
            let c = vertices[t[2] as usize];
            if (b - a).cross(&(c - a)).norm() > 1e-12 {
                kept.push(t);
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles: kept,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn triangle_vertices(&self, i: usize) -> [Vec3; 3] {
        let t = self.triangles[i];
        [
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        ]
    }

    pub fn centroid(&self) -> Vec3 {
        if self.vertices.is_empty() {
            return Vec3::zeros();
        }
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        let mut min = first;
        let mut max = first;
        for v in &self.vertices {
            min = min.inf(v);
            max = max.sup(v);
        }
        Some((min, max))
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|i| {
                let [a, b, c] = self.triangle_vertices(i);
                (b - a).cross(&(c - a)).norm() * 0.5
            })
            .sum()
    }

    pub fn transformed(&self, t: &SimTransform) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| t.apply(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn posed(&self, p: &Pose) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| p.apply(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn scaled(&self, s: f64) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| v * s).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Appends another mesh, remapping its indices.
    pub fn merge(&mut self, other: &TriangleMesh) {
        let base = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + base, t[1] + base, t[2] + base]),
        );
    }

    /// Every edge shared by exactly two triangles (closed 2-manifold,
    /// possibly with several components).
    pub fn is_watertight(&self) -> bool {
        if self.triangles.is_empty() {
            return false;
        }
        let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let a = t[k];
                let b = t[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                *edges.entry(key).or_insert(0) += 1;
            }
        }
        edges.values().all(|&c| c == 2)
    }

    /// Deterministic surface sampling: each triangle is subdivided into a
    /// barycentric lattice with spacing at most `spacing`. Lattice points
    /// include the triangle vertices and edges.
    pub fn sample_surface(&self, spacing: f64) -> Vec<Vec3> {
        let spacing = spacing.max(1e-6);
        let mut out = Vec::new();
        for i in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_vertices(i);
            let longest = (b - a).norm().max((c - a).norm()).max((c - b).norm());
            let k = (longest / spacing).ceil().max(1.0) as usize;
            let k = k.min(256);
            for ui in 0..=k {
                for vi in 0..=(k - ui) {
                    let u = ui as f64 / k as f64;
                    let v = vi as f64 / k as f64;
                    out.push(a + (b - a) * u + (c - a) * v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn quad_mesh() -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn degenerate_triangles_are_dropped() {
        let m = TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(2.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 1, 3]],
        )
        .unwrap();
        assert_eq!(m.triangles.len(), 1);
    }

    #[test]
    fn out_of_range_index_rejected() {
        assert!(TriangleMesh::new(vec![Vec3::zeros()], vec![[0, 0, 7]]).is_err());
    }

    #[test]
    fn open_quad_is_not_watertight() {
        assert!(!quad_mesh().is_watertight());
    }

    #[test]
    fn sampling_covers_edges_and_interior() {
        let m = quad_mesh();
        let samples = m.sample_surface(0.25);
        assert!(samples.len() > 20);
        // Corner vertices are included.
        assert!(samples
            .iter()
            .any(|p| (p - Vec3::new(0.0, 0.0, 0.0)).norm() < 1e-12));
        assert!(samples
            .iter()
            .any(|p| (p - Vec3::new(1.0, 1.0, 0.0)).norm() < 1e-12));
    }
}
