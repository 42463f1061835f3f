//! ASCII PLY and OBJ mesh readers/writers.
//!
//! Only vertex positions and triangle connectivity are handled; other
//! attributes are ignored on read and omitted on write. Polygonal faces
//! are fan-triangulated.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{TriangleMesh, Vec3};

/// Loads a mesh, dispatching on the file extension (`.ply` or `.obj`).
pub fn load_mesh(path: &Path) -> Result<TriangleMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("ply") => parse_ply(&text).map_err(|m| Error::MeshFormat {
            path: path.to_path_buf(),
            message: m,
        }),
        Some("obj") => parse_obj(&text).map_err(|m| Error::MeshFormat {
            path: path.to_path_buf(),
            message: m,
        }),
        other => Err(Error::MeshFormat {
            path: path.to_path_buf(),
            message: format!("unsupported mesh extension {:?}", other),
        }),
    }
}

pub fn save_mesh(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let text = match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("ply") => write_ply(mesh),
        Some("obj") => write_obj(mesh),
        other => {
            return Err(Error::MeshFormat {
                path: path.to_path_buf(),
                message: format!("unsupported mesh extension {:?}", other),
            })
        }
    };
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn parse_ply(text: &str) -> std::result::Result<TriangleMesh, String> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err("missing 'ply' magic".into());
    }
    let mut vertex_count = 0usize;
    let mut face_count = 0usize;
    let mut elements: Vec<(String, usize)> = Vec::new();
    let mut vertex_props: Vec<String> = Vec::new();
    let mut in_vertex_element = false;
    for line in lines.by_ref() {
        let line = line.trim();
        if line == "end_header" {
            break;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("format") => {
                if tok.next() != Some("ascii") {
                    return Err("only ascii PLY is supported".into());
                }
            }
            Some("element") => {
                let name = tok.next().ok_or("element without name")?.to_string();
                let count: usize = tok
                    .next()
                    .ok_or("element without count")?
                    .parse()
                    .map_err(|_| "bad element count")?;
                in_vertex_element = name == "vertex";
                if name == "vertex" {
                    vertex_count = count;
                } else if name == "face" {
                    face_count = count;
                }
                elements.push((name, count));
            }
            Some("property") => {
                if in_vertex_element {
                    let items: Vec<&str> = tok.collect();
                    if let Some(name) = items.last() {
                        vertex_props.push((*name).to_string());
                    }
                }
            }
            _ => {}
        }
    }
    let ix = vertex_props.iter().position(|p| p == "x").ok_or("no x property")?;
    let iy = vertex_props.iter().position(|p| p == "y").ok_or("no y property")?;
    let iz = vertex_props.iter().position(|p| p == "z").ok_or("no z property")?;

    let mut vertices = Vec::with_capacity(vertex_count);
    let mut triangles = Vec::with_capacity(face_count);
    for (name, count) in &elements {
        for _ in 0..*count {
            let line = lines.next().ok_or("unexpected end of body")?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match name.as_str() {
                "vertex" => {
                    let get = |i: usize| -> std::result::Result<f64, String> {
                        fields
                            .get(i)
                            .ok_or("short vertex line")?
                            .parse()
                            .map_err(|_| "bad vertex number".into())
                    };
                    vertices.push(Vec3::new(get(ix)?, get(iy)?, get(iz)?));
                }
                "face" => {
                    let n: usize = fields
                        .first()
                        .ok_or("empty face line")?
                        .parse()
                        .map_err(|_| "bad face count")?;
                    if fields.len() < n + 1 {
                        return Err("short face line".into());
                    }
                    let idx: std::result::Result<Vec<u32>, String> = fields[1..=n]
                        .iter()
                        .map(|f| f.parse().map_err(|_| "bad face index".into()))
                        .collect();
                    let idx = idx?;
                    for k in 1..n.saturating_sub(1) {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {} // skip unknown elements line-wise
            }
        }
    }
    TriangleMesh::new(vertices, triangles).map_err(|e| e.to_string())
}

pub fn parse_obj(text: &str) -> std::result::Result<TriangleMesh, String> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut get = || -> std::result::Result<f64, String> {
                    tok.next()
                        .ok_or_else(|| format!("line {}: short vertex", ln + 1))?
                        .parse()
                        .map_err(|_| format!("line {}: bad vertex number", ln + 1))
                };
                let (x, y, z) = (get()?, get()?, get()?);
                vertices.push(Vec3::new(x, y, z));
            }
            Some("f") => {
                let idx: std::result::Result<Vec<u32>, String> = tok
                    .map(|f| {
                        let first = f.split('/').next().unwrap_or("");
                        let v: i64 = first
                            .parse()
                            .map_err(|_| format!("line {}: bad face index", ln + 1))?;
                        let v = if v < 0 { vertices.len() as i64 + v } else { v - 1 };
                        if v < 0 {
                            return Err(format!("line {}: face index out of range", ln + 1));
                        }
                        Ok(v as u32)
                    })
                    .collect();
                let idx = idx?;
                if idx.len() < 3 {
                    return Err(format!("line {}: face with <3 vertices", ln + 1));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, triangles).map_err(|e| e.to_string())
}

/// Shortest-round-trip float formatting; deterministic across runs.
pub(crate) fn fmt_f64(x: f64) -> String {
    let mut s = String::new();
    write!(s, "{}", x).unwrap();
    s
}

pub fn write_ply(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", mesh.vertices.len());
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    let _ = writeln!(out, "element face {}", mesh.triangles.len());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for v in &mesh.vertices {
        let _ = writeln!(out, "{} {} {}", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z));
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_f64(v.x), fmt_f64(v.y), fmt_f64(v.z));
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_mesh() -> TriangleMesh {
        TriangleMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.5, 0.0, 0.0),
                Vec3::new(0.0, 2.25, 0.0),
                Vec3::new(0.0, 0.0, -3.125),
            ],
            vec![[0, 1, 2], [0, 1, 3], [1, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn ply_round_trip() {
        let mesh = sample_mesh();
        let text = write_ply(&mesh);
        let back = parse_ply(&text).unwrap();
        assert_eq!(mesh, back);
    }

    #[test]
    fn obj_round_trip() {
        let mesh = sample_mesh();
        let text = write_obj(&mesh);
        let back = parse_obj(&text).unwrap();
        assert_eq!(mesh, back);
    }

    #[test]
    fn obj_with_normals_and_quads() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
        let mesh = parse_obj(text).unwrap();
        assert_eq!(mesh.vertices.len(), 4);
        assert_eq!(mesh.triangles.len(), 2);
    }

    #[test]
    fn ply_ignores_extra_vertex_properties() {
        let text = "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\nproperty uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0 255\n1 0 0 255\n0 1 0 255\n3 0 1 2\n";
        let mesh = parse_ply(text).unwrap();
        assert_eq!(mesh.vertices.len(), 3);
        assert_eq!(mesh.triangles.len(), 1);
    }

    #[test]
    fn truncated_ply_reports_error() {
        let text = "ply\nformat ascii 1.0\nelement vertex 5\nproperty float x\nproperty float y\nproperty float z\nend_header\n0 0 0\n";
        assert!(parse_ply(text).is_err());
    }
}
