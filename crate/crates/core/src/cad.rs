//! CAD model library: loading, canonicalization, and per-orientation
//! feature precomputation.
//!
//! A model is a chain of parts; part `i > 0` attaches to part `i - 1`
//! through its joint. Articulated models are assembled, matched, and
//! aligned in their closed configuration (all joints at the lower limit).
//! Canonical pose puts the assembled bounding-box center at the origin
//! with axes aligned and up-direction `+z`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    convex_hull_3d, extract_planes_from_points, fit_oriented_box_points, ConvexHull, Mat3,
    OrientedBox, PlaneExtractParams, Pose, SurfacePlane, TriangleMesh, Vec3,
};
use crate::jsonio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointKind {
    Fixed,
    Revolute,
    Prismatic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    pub kind: JointKind,
    /// Unit axis in the child part's frame.
    pub axis: Vec3,
    /// Transform from the parent part's frame to the joint (child) frame.
    pub origin: Pose,
    /// `[lower, upper]`, radians for revolute and meters for prismatic.
    pub limits: [f64; 2],
}

impl JointSpec {
    fn validate(&self, model: &str) -> Result<()> {
        if (self.axis.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::CadDb(format!("{model}: joint axis must be unit length")));
        }
        if self.limits[0] > self.limits[1] {
            return Err(Error::CadDb(format!("{model}: joint limits out of order")));
        }
        if self.kind == JointKind::Revolute {
            let tau = 2.0 * std::f64::consts::PI;
            if self.limits[0] < -tau - 1e-9 || self.limits[1] > tau + 1e-9 {
                return Err(Error::CadDb(format!(
                    "{model}: revolute limits must lie within [-2pi, 2pi]"
                )));
            }
        }
        Ok(())
    }

    /// Pose of the joint frame at a given joint value.
    pub fn motion(&self, value: f64) -> Pose {
        match self.kind {
            JointKind::Fixed => Pose::identity(),
            JointKind::Revolute => {
                let axis = nalgebra::Unit::new_normalize(self.axis);
                Pose::new(
                    nalgebra::Rotation3::from_axis_angle(&axis, value).into_inner(),
                    Vec3::zeros(),
                )
            }
            JointKind::Prismatic => Pose::new(Mat3::identity(), self.axis * value),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CadPart {
    pub name: String,
    /// Mesh in the part's own frame.
    pub mesh: TriangleMesh,
    /// Joint to the previous part in the chain; `None` for the base part.
    pub joint: Option<JointSpec>,
}

#[derive(Debug, Clone)]
pub struct CadModel {
    pub id: String,
    pub class: String,
    pub parts: Vec<CadPart>,
    /// Canonical box: centered at the origin, yaw zero.
    pub bbox: OrientedBox,
    /// Planes of the assembled model in the canonical frame.
    pub planes: Vec<SurfacePlane>,
    /// Up direction in the canonical frame, always `+z`.
    pub up: Vec3,
}

impl CadModel {
    /// Poses of each part in the model frame at the closed configuration.
    pub fn closed_part_poses(&self) -> Vec<Pose> {
        let mut poses: Vec<Pose> = Vec::with_capacity(self.parts.len());
        for (i, part) in self.parts.iter().enumerate() {
            let pose = match (&part.joint, i) {
                (None, _) | (_, 0) => Pose::identity(),
                (Some(j), _) => poses[i - 1].compose(&j.origin).compose(&j.motion(j.limits[0])),
            };
            poses.push(pose);
        }
        poses
    }

    /// Union mesh of all parts in the closed configuration, model frame.
    pub fn assembled_mesh(&self) -> TriangleMesh {
        let poses = self.closed_part_poses();
        let mut out = TriangleMesh::default();
        for (part, pose) in self.parts.iter().zip(&poses) {
            out.merge(&part.mesh.posed(pose));
        }
        out
    }

    /// Convex hull per part (closed configuration, model frame); the
    /// collision geometry used in validation.
    pub fn part_hulls(&self) -> Vec<ConvexHull> {
        let poses = self.closed_part_poses();
        self.parts
            .iter()
            .zip(&poses)
            .filter(|(p, _)| !p.mesh.is_empty())
            .map(|(p, pose)| convex_hull_3d(&p.mesh.posed(pose).vertices))
            .collect()
    }
}

/// One of the 24 rotations of the cube group, stored exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscreteRot {
    pub index: usize,
    m: [[i8; 3]; 3],
}

impl DiscreteRot {
    pub fn matrix(&self) -> Mat3 {
        Mat3::from_fn(|r, c| self.m[r][c] as f64)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.matrix() * v
    }

    fn mul(&self, other: &DiscreteRot) -> [[i8; 3]; 3] {
        let mut out = [[0i8; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                for k in 0..3 {
                    out[r][c] += self.m[r][k] * other.m[k][c];
                }
            }
        }
        out
    }
}

/// The 24 orientations: index = face * 4 + quarter_turn, where `face`
/// selects the image of `+z` in the order `+z, -z, +x, -x, +y, -y` and
/// `quarter_turn` applies `Rz(k * 90deg)` afterwards.
pub fn orientation_set() -> &'static [DiscreteRot; 24] {
    static SET: std::sync::OnceLock<[DiscreteRot; 24]> = std::sync::OnceLock::new();
    SET.get_or_init(|| {
        let rz90 = DiscreteRot {
            index: 0,
            m: [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
        };
        let bases: [[[i8; 3]; 3]; 6] = [
            [[1, 0, 0], [0, 1, 0], [0, 0, 1]],   // up +z
            [[1, 0, 0], [0, -1, 0], [0, 0, -1]], // up -z (Rx 180)
            [[0, 0, 1], [0, 1, 0], [-1, 0, 0]],  // up +x (Ry 90)
            [[0, 0, -1], [0, 1, 0], [1, 0, 0]],  // up -x (Ry -90)
            [[1, 0, 0], [0, 0, 1], [0, -1, 0]],  // up +y (Rx -90)
            [[1, 0, 0], [0, 0, -1], [0, 1, 0]],  // up -y (Rx 90)
        ];
        let mut set = [DiscreteRot {
            index: 0,
            m: bases[0],
        }; 24];
        for (f, base) in bases.iter().enumerate() {
            let mut acc = *base;
            for k in 0..4 {
                set[f * 4 + k] = DiscreteRot {
                    index: f * 4 + k,
                    m: acc,
                };
                acc = rz90.mul(&DiscreteRot { index: 0, m: acc });
            }
        }
        set
    })
}

/// Precomputed geometry of one (model, orientation) pair, expressed in the
/// rotated canonical frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientedFeatures {
    pub rotation: usize,
    pub size: Vec3,
    pub planes: Vec<SurfacePlane>,
    pub up: Vec3,
}

/// Rotates the canonical features into each of the 24 orientations.
pub fn precompute_oriented_features(model: &CadModel) -> Vec<OrientedFeatures> {
    orientation_set()
        .iter()
        .map(|rot| {
            let m = rot.matrix();
            let size = m * model.bbox.size;
            OrientedFeatures {
                rotation: rot.index,
                size: Vec3::new(size.x.abs(), size.y.abs(), size.z.abs()),
                planes: model
                    .planes
                    .iter()
                    .map(|p| SurfacePlane {
                        normal: m * p.normal,
                        offset: p.offset,
                    })
                    .collect(),
                up: m * model.up,
            }
        })
        .collect()
}

/// Surface-plane extraction for canonical CAD models. The sampling
/// spacing adapts so plane significance scales with the model's surface
/// area rather than its tessellation.
pub fn extract_cad_planes(mesh: &TriangleMesh, seed: u64) -> Vec<SurfacePlane> {
    let area = mesh.surface_area().max(1e-6);
    let spacing = (area / 8000.0).sqrt().clamp(0.004, 0.05);
    let samples = mesh.sample_surface(spacing);
    let params = PlaneExtractParams::default();
    extract_planes_from_points(&samples, &params, seed)
}

/// Rigidly re-poses a model so its assembled box is centered at the
/// origin with yaw zero, then re-derives box and planes. Idempotent.
pub fn canonicalize(mut model: CadModel) -> Result<CadModel> {
    let assembled = model.assembled_mesh();
    if assembled.is_empty() {
        return Err(Error::CadDb(format!("model {}: empty mesh", model.id)));
    }
    let bbox = fit_oriented_box_points(&assembled.vertices);
    let to_canonical = Pose::from_yaw(-bbox.yaw, Vec3::zeros())
        .compose(&Pose::new(Mat3::identity(), -bbox.center));
    if let Some(base) = model.parts.first_mut() {
        base.mesh = base.mesh.posed(&to_canonical);
    }
    if model.parts.len() > 1 {
        if let Some(joint) = model.parts[1].joint.as_mut() {
            joint.origin = to_canonical.compose(&joint.origin);
        }
    }
    let assembled = model.assembled_mesh();
    let bbox = fit_oriented_box_points(&assembled.vertices);
    let seed = jsonio::derive_seed(0x5eed_cad, &model.id);
    model.planes = extract_cad_planes(&assembled, seed);
    model.bbox = bbox;
    model.up = Vec3::new(0.0, 0.0, 1.0);
    Ok(model)
}

// ---------------------------------------------------------------------------
// Disk format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ManifestDoc {
    models: Vec<String>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelDoc {
    id: String,
    class: String,
    parts: Vec<PartDoc>,
    #[serde(default)]
    canonical_transform: Option<TransformDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PartDoc {
    name: String,
    mesh: String,
    #[serde(default)]
    joint: Option<JointDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JointDoc {
    #[serde(rename = "type")]
    kind: JointKind,
    axis: [f64; 3],
    origin: OriginDoc,
    limits: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
struct OriginDoc {
    xyz: [f64; 3],
    rpy: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
struct TransformDoc {
    yaw: f64,
    translation: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct FeatureCacheDoc {
    features: BTreeMap<String, Vec<OrientedFeatures>>,
}

#[derive(Debug)]
pub struct CadDatabase {
    pub root: PathBuf,
    pub models: BTreeMap<String, CadModel>,
    pub features: BTreeMap<String, Vec<OrientedFeatures>>,
    pub aliases: BTreeMap<String, String>,
}

impl CadDatabase {
    /// Loads a database directory: `manifest.json`, one descriptor per
    /// model directory, and the feature cache (regenerated when stale).
    pub fn load(root: &Path) -> Result<CadDatabase> {
        let manifest: ManifestDoc = jsonio::read_json(&root.join("manifest.json"))?;
        let mut models = BTreeMap::new();
        for rel in &manifest.models {
            let dir = root.join(rel);
            let doc: ModelDoc = jsonio::read_json(&dir.join("model.json"))?;
            let model = load_model(&dir, doc)?;
            if models.contains_key(&model.id) {
                return Err(Error::CadDb(format!("duplicate model id {:?}", model.id)));
            }
            models.insert(model.id.clone(), model);
        }

        let cache_path = root.join("features.json");
        let features = match jsonio::read_json::<FeatureCacheDoc>(&cache_path) {
            Ok(doc) if doc.features.keys().eq(models.keys()) => doc.features,
            _ => models
                .iter()
                .map(|(id, m)| (id.clone(), precompute_oriented_features(m)))
                .collect(),
        };

        Ok(CadDatabase {
            root: root.to_path_buf(),
            models,
            features,
            aliases: manifest.aliases,
        })
    }

    /// Writes manifest, model descriptors, part meshes, and the feature
    /// cache under `dir`. Byte-deterministic.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let manifest = ManifestDoc {
            models: self
                .models
                .keys()
                .map(|id| format!("models/{id}"))
                .collect(),
            aliases: self.aliases.clone(),
        };
        jsonio::write_json(&dir.join("manifest.json"), &manifest)?;
        for (id, model) in &self.models {
            let mdir = dir.join("models").join(id);
            std::fs::create_dir_all(&mdir).map_err(|e| Error::io(&mdir, e))?;
            let mut parts = Vec::new();
            for (i, part) in model.parts.iter().enumerate() {
                let mesh_name = format!("part{i}.obj");
                crate::mesh_io::save_mesh(&mdir.join(&mesh_name), &part.mesh)?;
                parts.push(PartDoc {
                    name: part.name.clone(),
                    mesh: mesh_name,
                    joint: part.joint.as_ref().map(|j| {
                        let (r, p, y) = j.origin.rpy();
                        JointDoc {
                            kind: j.kind,
                            axis: [j.axis.x, j.axis.y, j.axis.z],
                            origin: OriginDoc {
                                xyz: [
                                    j.origin.translation.x,
                                    j.origin.translation.y,
                                    j.origin.translation.z,
                                ],
                                rpy: [r, p, y],
                            },
                            limits: j.limits,
                        }
                    }),
                });
            }
            let doc = ModelDoc {
                id: id.clone(),
                class: model.class.clone(),
                parts,
                canonical_transform: None,
            };
            jsonio::write_json(&mdir.join("model.json"), &doc)?;
        }
        jsonio::write_json(
            &dir.join("features.json"),
            &FeatureCacheDoc {
                features: self.features.clone(),
            },
        )
    }

    pub fn canonical_class<'a>(&'a self, class: &'a str) -> &'a str {
        self.aliases.get(class).map(String::as_str).unwrap_or(class)
    }

    /// All models in a semantic class (after alias normalization), in
    /// deterministic id order.
    pub fn query_by_class(&self, class: &str) -> Vec<&CadModel> {
        let canon = self.canonical_class(class);
        self.models.values().filter(|m| m.class == canon).collect()
    }

    pub fn oriented_features(&self, model_id: &str) -> &[OrientedFeatures] {
        &self.features[model_id]
    }
}

fn load_model(dir: &Path, doc: ModelDoc) -> Result<CadModel> {
    if doc.parts.is_empty() {
        return Err(Error::CadDb(format!("model {}: no parts", doc.id)));
    }
    let mut parts = Vec::new();
    for (i, p) in doc.parts.iter().enumerate() {
        let mesh = crate::mesh_io::load_mesh(&dir.join(&p.mesh))?;
        if mesh.is_empty() {
            return Err(Error::CadDb(format!(
                "model {}: part {} has an empty mesh",
                doc.id, p.name
            )));
        }
        let joint = match (&p.joint, i) {
            (Some(_), 0) => {
                return Err(Error::CadDb(format!(
                    "model {}: base part cannot have a joint",
                    doc.id
                )));
            }
            (Some(j), _) => {
                let axis = Vec3::new(j.axis[0], j.axis[1], j.axis[2]);
                let spec = JointSpec {
                    kind: j.kind,
                    axis,
                    origin: Pose::new(
                        rpy_matrix(j.origin.rpy),
                        Vec3::new(j.origin.xyz[0], j.origin.xyz[1], j.origin.xyz[2]),
                    ),
                    limits: j.limits,
                };
                spec.validate(&doc.id)?;
                Some(spec)
            }
            (None, 0) => None,
            (None, _) => {
                return Err(Error::CadDb(format!(
                    "model {}: non-base part {} needs a joint",
                    doc.id, p.name
                )))
            }
        };
        parts.push(CadPart {
            name: p.name.clone(),
            mesh,
            joint,
        });
    }

    let mut model = CadModel {
        id: doc.id,
        class: doc.class,
        parts,
        bbox: OrientedBox::new(Vec3::zeros(), 0.0, Vec3::new(1.0, 1.0, 1.0)),
        planes: Vec::new(),
        up: Vec3::new(0.0, 0.0, 1.0),
    };
    if let Some(t) = &doc.canonical_transform {
        let pose = Pose::from_yaw(
            t.yaw,
            Vec3::new(t.translation[0], t.translation[1], t.translation[2]),
        );
        if let Some(base) = model.parts.first_mut() {
            base.mesh = base.mesh.posed(&pose);
        }
    }
    canonicalize(model)
}

fn rpy_matrix(rpy: [f64; 3]) -> Mat3 {
    let rz = Pose::from_yaw(rpy[2], Vec3::zeros()).rotation;
    let ry = nalgebra::Rotation3::from_axis_angle(&Vec3::y_axis(), rpy[1]).into_inner();
    let rx = nalgebra::Rotation3::from_axis_angle(&Vec3::x_axis(), rpy[0]).into_inner();
    rz * ry * rx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn slab(center: Vec3, size: Vec3) -> TriangleMesh {
        let mut pts = Vec::new();
        for &x in &[-0.5, 0.5] {
            for &y in &[-0.5, 0.5] {
                for &z in &[-0.5, 0.5] {
                    pts.push(center + Vec3::new(size.x * x, size.y * y, size.z * z));
                }
            }
        }
        convex_hull_3d(&pts).to_mesh()
    }

    fn rigid_model(id: &str, class: &str, center: Vec3, size: Vec3) -> CadModel {
        CadModel {
            id: id.into(),
            class: class.into(),
            parts: vec![CadPart {
                name: "body".into(),
                mesh: slab(center, size),
                joint: None,
            }],
            bbox: OrientedBox::new(Vec3::zeros(), 0.0, Vec3::new(1.0, 1.0, 1.0)),
            planes: Vec::new(),
            up: Vec3::new(0.0, 0.0, 1.0),
        }
    }

    #[test]
    fn orientation_set_properties() {
        let set = orientation_set();
        assert_eq!(set.len(), 24);
        assert_eq!(set[0].m, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        for i in 0..24 {
            for j in (i + 1)..24 {
                assert_ne!(set[i].m, set[j].m, "rotations {i} and {j} collide");
            }
        }
        // Closed under composition.
        for a in set.iter() {
            for b in set.iter() {
                let prod = a.mul(b);
                assert!(set.iter().any(|r| r.m == prod));
            }
        }
        // The quarter turn about z is 4-periodic.
        let rz = set
            .iter()
            .find(|r| r.m == [[0, -1, 0], [1, 0, 0], [0, 0, 1]])
            .unwrap();
        let mut acc = *rz;
        for _ in 0..3 {
            acc = DiscreteRot {
                index: 0,
                m: rz.mul(&acc),
            };
        }
        assert_eq!(acc.m, set[0].m);
    }

    #[test]
    fn orientations_preserve_cube() {
        // Applying any of the 24 rotations to an axis-aligned cube's corner
        // set maps it onto itself.
        let corners: Vec<Vec3> = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 1 == 0 { -1.0 } else { 1.0 },
                    if i & 2 == 0 { -1.0 } else { 1.0 },
                    if i & 4 == 0 { -1.0 } else { 1.0 },
                )
            })
            .collect();
        for rot in orientation_set() {
            for c in &corners {
                let image = rot.apply(c);
                assert!(corners.iter().any(|o| (o - image).norm() < 1e-12));
            }
        }
    }

    #[test]
    fn canonicalize_recenters_translated_cube() {
        let model = rigid_model("box_a", "box", Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.4, 0.3, 0.2));
        let canon = canonicalize(model).unwrap();
        assert_relative_eq!(canon.bbox.center, Vec3::zeros(), epsilon = 1e-9);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let model = rigid_model("box_a", "box", Vec3::new(0.3, -0.4, 0.7), Vec3::new(0.5, 0.3, 0.2));
        let once = canonicalize(model).unwrap();
        let twice = canonicalize(once.clone()).unwrap();
        assert_relative_eq!(once.bbox.center, twice.bbox.center, epsilon = 1e-9);
        assert_relative_eq!(once.bbox.size, twice.bbox.size, epsilon = 1e-9);
        let va = once.assembled_mesh();
        let vb = twice.assembled_mesh();
        for (a, b) in va.vertices.iter().zip(vb.vertices.iter()) {
            assert_relative_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn articulated_union_box_encloses_parts() {
        // Fridge-like: body plus a thinner door in front at the closed pose.
        let body = slab(Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.6, 0.6, 1.6));
        let door = slab(Vec3::new(0.0, 0.325, 0.0), Vec3::new(0.6, 0.05, 1.6));
        let model = CadModel {
            id: "fridge_a".into(),
            class: "fridge".into(),
            parts: vec![
                CadPart {
                    name: "body".into(),
                    mesh: body,
                    joint: None,
                },
                CadPart {
                    name: "door".into(),
                    mesh: door,
                    joint: Some(JointSpec {
                        kind: JointKind::Revolute,
                        axis: Vec3::new(0.0, 0.0, 1.0),
                        origin: Pose::identity(),
                        limits: [0.0, 2.0],
                    }),
                },
            ],
            bbox: OrientedBox::new(Vec3::zeros(), 0.0, Vec3::new(1.0, 1.0, 1.0)),
            planes: Vec::new(),
            up: Vec3::new(0.0, 0.0, 1.0),
        };
        let canon = canonicalize(model).unwrap();
        // Independent recomputation of the union box.
        let assembled = canon.assembled_mesh();
        let check = fit_oriented_box_points(&assembled.vertices);
        assert_relative_eq!(check.center, Vec3::zeros(), epsilon = 1e-9);
        assert_relative_eq!(canon.bbox.size.y, 0.65, epsilon = 1e-9);
        assert_relative_eq!(canon.bbox.size.z, 1.6, epsilon = 1e-9);
    }

    #[test]
    fn oriented_features_permute_sizes_and_flip_up() {
        let model =
            canonicalize(rigid_model("box_a", "box", Vec3::zeros(), Vec3::new(0.2, 0.4, 0.8)))
                .unwrap();
        let feats = precompute_oriented_features(&model);
        assert_eq!(feats.len(), 24);
        assert_relative_eq!(feats[0].size, model.bbox.size, epsilon = 1e-12);
        assert_relative_eq!(feats[0].up, Vec3::new(0.0, 0.0, 1.0), epsilon = 1e-12);
        // Upside-down entries flip the up vector.
        assert_relative_eq!(feats[4].up, Vec3::new(0.0, 0.0, -1.0), epsilon = 1e-12);
        for f in &feats {
            let mut canon: Vec<f64> = model.bbox.size.iter().cloned().collect();
            let mut got: Vec<f64> = f.size.iter().cloned().collect();
            canon.sort_by(|a, b| a.partial_cmp(b).unwrap());
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (c, g) in canon.iter().zip(got.iter()) {
                assert_relative_eq!(c, g, epsilon = 1e-12);
            }
            assert_eq!(f.planes.len(), model.planes.len());
        }
    }
}
