//! Contact graph: a support parse tree plus proximal edges.
//!
//! Nodes are scene entities; directed support edges carry the parent's
//! supporting plane and are chosen by a score that combines contact
//! alignment and effective supporting area. Proximal edges connect
//! box-overlapping pairs that do not support each other.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    boxes_overlap_volume, OrientedBox, SimTransform, SurfacePlane, TriangleMesh, Vec3, GRAVITY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    SceneRoot,
    Layout,
    RigidObject,
    ArticulatedObject,
}

/// Chosen CAD replacement for an entity, installed by scene validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replacement {
    pub model_id: String,
    /// Index into the 24-element orientation set.
    pub orientation: usize,
    /// Similarity transform applied to the orientation-rotated model.
    pub transform: SimTransform,
    /// Rank in the entity's alignment-error ordering (0 = best).
    pub rank: usize,
    pub alignment_error: f64,
}

#[derive(Debug, Clone)]
pub struct SceneEntity {
    pub id: String,
    pub class: String,
    pub kind: EntityKind,
    pub mesh: TriangleMesh,
    /// Relative mesh reference used by serialization; meshes are never
    /// embedded in documents.
    pub mesh_path: Option<PathBuf>,
    pub bbox: Option<OrientedBox>,
    pub planes: Vec<SurfacePlane>,
    pub replacement: Option<Replacement>,
}

impl SceneEntity {
    pub fn root() -> Self {
        SceneEntity {
            id: ROOT_ID.to_string(),
            class: "scene".to_string(),
            kind: EntityKind::SceneRoot,
            mesh: TriangleMesh::default(),
            mesh_path: None,
            bbox: None,
            planes: Vec::new(),
            replacement: None,
        }
    }

    pub fn obb(&self) -> &OrientedBox {
        self.bbox
            .as_ref()
            .expect("non-root scene entities always carry a box")
    }
}

pub const ROOT_ID: &str = "scene";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEdge {
    pub parent: String,
    pub child: String,
    /// The parent's supporting plane; `None` only for attachments to the
    /// scene root (layouts and orphans).
    pub plane: Option<SurfacePlane>,
    pub score: f64,
    /// Set when the child is not in snapped contact with the plane:
    /// fallback attachments and gaps beyond the refinement range.
    pub floating: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProximalEdge {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone)]
pub struct ContactGraph {
    pub entities: BTreeMap<String, SceneEntity>,
    pub support_edges: Vec<SupportEdge>,
    pub proximal_edges: Vec<ProximalEdge>,
}

impl ContactGraph {
    pub fn root(&self) -> &SceneEntity {
        &self.entities[ROOT_ID]
    }

    pub fn parent_edge(&self, child: &str) -> Option<&SupportEdge> {
        self.support_edges.iter().find(|e| e.child == child)
    }

    pub fn children_of(&self, parent: &str) -> Vec<&SupportEdge> {
        self.support_edges
            .iter()
            .filter(|e| e.parent == parent)
            .collect()
    }

    /// Non-root entities in deterministic order.
    pub fn non_root_ids(&self) -> Vec<String> {
        self.entities
            .keys()
            .filter(|id| id.as_str() != ROOT_ID)
            .cloned()
            .collect()
    }

    /// Checks the parse-tree property: every non-root entity has exactly
    /// one parent and is reachable from the root.
    pub fn is_tree(&self) -> bool {
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &self.support_edges {
            *seen.entry(e.child.as_str()).or_insert(0) += 1;
        }
        if self
            .entities
            .keys()
            .filter(|id| id.as_str() != ROOT_ID)
            .any(|id| seen.get(id.as_str()) != Some(&1))
        {
            return false;
        }
        // DFS from the root must visit every node exactly once.
        let mut visited: BTreeSet<&str> = BTreeSet::new();
        let mut stack = vec![ROOT_ID];
        while let Some(cur) = stack.pop() {
            if !visited.insert(cur) {
                return false;
            }
            for e in self.support_edges.iter().filter(|e| e.parent == cur) {
                stack.push(e.child.as_str());
            }
        }
        visited.len() == self.entities.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphParams {
    /// Supporting-plane normal tolerance: a plane supports only if
    /// `n · g <= a_th`.
    pub a_th: f64,
    /// Minimum stable support area ratio.
    pub b_th: f64,
    /// Distance band for counting mesh points as belonging to a plane.
    pub plane_inlier_tol: f64,
    /// Vertical slack when collecting "spatially below" candidates.
    pub below_slack: f64,
    /// Largest contact gap closed by box refinement; wider gaps leave the
    /// edge flagged floating.
    pub refine_max_gap: f64,
    pub layout_classes: Vec<String>,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            a_th: -0.9,
            b_th: 0.5,
            plane_inlier_tol: 0.01,
            below_slack: 0.1,
            refine_max_gap: 0.1,
            layout_classes: vec!["floor".into(), "wall".into(), "ceiling".into()],
        }
    }
}

impl GraphParams {
    pub fn is_layout_class(&self, class: &str) -> bool {
        self.layout_classes.iter().any(|c| c == class)
    }
}

/// Vertical gap between the child's box bottom and a supporting plane:
/// `D = p^g - (-d + s^g / 2)`. Zero means exact contact; positive means
/// the child floats above the plane.
pub fn support_distance(child_box: &OrientedBox, plane: &SurfacePlane) -> f64 {
    child_box.center.z - (-plane.offset + child_box.size.z * 0.5)
}

/// Effective supporting-area ratio `A(parent ∩ child) / A(child)`.
///
/// Parent surface points near the plane (within `tol`) are collected from
/// triangles intersecting the band, bounded by a rectangle in the child's
/// footprint frame, and clipped to the child footprint.
pub fn support_area_ratio(
    parent_mesh: &TriangleMesh,
    plane: &SurfacePlane,
    child: &SceneEntity,
    tol: f64,
) -> Result<f64> {
    let child_box = child
        .bbox
        .as_ref()
        .ok_or_else(|| Error::DegenerateEntity(child.id.clone()))?;
    support_area_ratio_with_tol(parent_mesh, plane, child_box, tol)
        .ok_or_else(|| Error::DegenerateEntity(child.id.clone()))
}

pub(crate) fn support_area_ratio_with_tol(
    parent_mesh: &TriangleMesh,
    plane: &SurfacePlane,
    child_box: &OrientedBox,
    tol: f64,
) -> Option<f64> {
    let hx = child_box.size.x * 0.5;
    let hy = child_box.size.y * 0.5;
    let child_area = child_box.footprint_area();
    if child_area < 1e-12 {
        return None;
    }
    let spacing = (child_area.sqrt() / 50.0).clamp(0.004, 0.05);

    let mut umin = f64::INFINITY;
    let mut umax = f64::NEG_INFINITY;
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    let mut any = false;

    for ti in 0..parent_mesh.triangles.len() {
        let tri = parent_mesh.triangle_vertices(ti);
        let d0 = plane.signed_distance(&tri[0]);
        let d1 = plane.signed_distance(&tri[1]);
        let d2 = plane.signed_distance(&tri[2]);
        if d0.min(d1).min(d2) > tol || d0.max(d1).max(d2) < -tol {
            continue;
        }
        let longest = (tri[1] - tri[0])
            .norm()
            .max((tri[2] - tri[0]).norm())
            .max((tri[2] - tri[1]).norm());
        let k = ((longest / spacing).ceil() as usize).clamp(1, 128);
        let rim = 1.05 * longest / k as f64;
        for ui in 0..=k {
            for vi in 0..=(k - ui) {
                let u = ui as f64 / k as f64;
                let v = vi as f64 / k as f64;
                let p = tri[0] + (tri[1] - tri[0]) * u + (tri[2] - tri[0]) * v;
                if plane.signed_distance(&p).abs() > tol {
                    continue;
                }
                let f = child_box.to_footprint_frame(&p);
                // Keep a one-lattice rim outside the footprint so the later
                // clip can reach the true footprint boundary.
                if f.x.abs() > hx + rim || f.y.abs() > hy + rim {
                    continue;
                }
                umin = umin.min(f.x);
                umax = umax.max(f.x);
                vmin = vmin.min(f.y);
                vmax = vmax.max(f.y);
                any = true;
            }
        }
    }

    if !any {
        return Some(0.0);
    }
    let w = umax.min(hx) - umin.max(-hx);
    let h = vmax.min(hy) - vmin.max(-hy);
    if w <= 0.0 || h <= 0.0 {
        return Some(0.0);
    }
    Some((w * h / child_area).clamp(0.0, 1.0))
}

/// Support likelihood `{1 - min[1, |D|]} * A(parent, child)`; both factors
/// lie in `[0, 1]`.
pub fn support_score(distance: f64, area_ratio: f64) -> f64 {
    (1.0 - distance.abs().min(1.0)) * area_ratio
}

#[derive(Debug, Clone)]
pub struct ParentChoice {
    pub parent: String,
    pub plane: SurfacePlane,
    pub score: f64,
    pub floating: bool,
}

/// Picks the most likely supporter for `child` among `candidates`.
///
/// Candidates must be spatially below the child (supporting-plane height
/// at most the child's box bottom plus slack) and offer at least one
/// upward plane. If nothing scores above zero the floor is returned with
/// a floating flag; with no floor either, an orphan error is raised.
pub fn infer_parent(
    child: &SceneEntity,
    candidates: &[&SceneEntity],
    floor: Option<&SceneEntity>,
    params: &GraphParams,
) -> Result<ParentChoice> {
    let child_box = child
        .bbox
        .as_ref()
        .ok_or_else(|| Error::DegenerateEntity(child.id.clone()))?;
    let child_bottom = child_box.bottom();

    struct Best {
        parent: String,
        plane: SurfacePlane,
        score: f64,
        abs_d: f64,
        footprint: f64,
    }
    let mut best: Option<Best> = None;

    for cand in candidates {
        if cand.id == child.id {
            continue;
        }
        let Some(cand_box) = cand.bbox.as_ref() else {
            continue;
        };
        for plane in &cand.planes {
            if !plane.is_supporting(&GRAVITY, params.a_th) {
                continue;
            }
            if plane.height() > child_bottom + params.below_slack {
                continue;
            }
            let d = support_distance(child_box, plane);
            let ratio = support_area_ratio_with_tol(
                &cand.mesh,
                plane,
                child_box,
                params.plane_inlier_tol,
            )
            .unwrap_or(0.0);
            let score = support_score(d, ratio);
            let better = match &best {
                None => score > 0.0,
                Some(b) => {
                    let cmp = (score, -d.abs(), -cand_box.footprint_area(), &cand.id);
                    let cur = (b.score, -b.abs_d, -b.footprint, &b.parent);
                    // Higher score wins, then smaller |D|, smaller parent
                    // footprint, and lexicographic id.
                    match cmp.0.partial_cmp(&cur.0).unwrap() {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => match cmp.1.partial_cmp(&cur.1).unwrap() {
                            std::cmp::Ordering::Greater => true,
                            std::cmp::Ordering::Less => false,
                            std::cmp::Ordering::Equal => {
                                match cmp.2.partial_cmp(&cur.2).unwrap() {
                                    std::cmp::Ordering::Greater => true,
                                    std::cmp::Ordering::Less => false,
                                    std::cmp::Ordering::Equal => cmp.3 < cur.3,
                                }
                            }
                        },
                    }
                }
            };
            if better && score > 0.0 {
                best = Some(Best {
                    parent: cand.id.clone(),
                    plane: *plane,
                    score,
                    abs_d: d.abs(),
                    footprint: cand_box.footprint_area(),
                });
            }
        }
    }

    if let Some(b) = best {
        return Ok(ParentChoice {
            parent: b.parent,
            plane: b.plane,
            score: b.score,
            floating: false,
        });
    }

    if let Some(floor) = floor {
        let plane = floor
            .planes
            .iter()
            .find(|p| p.is_supporting(&GRAVITY, params.a_th))
            .copied()
            .unwrap_or_else(|| {
                SurfacePlane::new(Vec3::new(0.0, 0.0, 1.0), -floor.obb().top())
            });
        return Ok(ParentChoice {
            parent: floor.id.clone(),
            plane,
            score: 0.0,
            floating: true,
        });
    }
    Err(Error::OrphanEntity(child.id.clone()))
}

/// Snaps the box bottom onto the supporting plane, keeping the top face
/// and footprint fixed: afterwards the support distance is exactly zero.
pub fn refine_box(bbox: &OrientedBox, plane: &SurfacePlane, entity_id: &str) -> Result<OrientedBox> {
    let plane_h = plane.height();
    let top = bbox.top();
    if plane_h >= top {
        return Err(Error::RefinementInvertsBox {
            entity: entity_id.to_string(),
            plane_height: plane_h,
            box_top: top,
        });
    }
    Ok(OrientedBox::new(
        Vec3::new(bbox.center.x, bbox.center.y, (top + plane_h) * 0.5),
        bbox.yaw,
        Vec3::new(bbox.size.x, bbox.size.y, top - plane_h),
    ))
}

/// Builds the contact graph over a set of entities.
///
/// Layout entities attach to the synthetic scene root; objects get exactly
/// one support parent each by [`infer_parent`], processed bottom-up, with
/// support-based box refinement. Proximal edges connect every remaining
/// box-overlapping pair. Output is deterministic for a fixed input.
pub fn build_graph(
    entities: Vec<SceneEntity>,
    params: &GraphParams,
) -> Result<(ContactGraph, Vec<String>)> {
    let mut warnings = Vec::new();
    let mut map: BTreeMap<String, SceneEntity> = BTreeMap::new();
    map.insert(ROOT_ID.to_string(), SceneEntity::root());
    for e in entities {
        if e.id == ROOT_ID {
            return Err(Error::SceneInput(format!(
                "entity id {ROOT_ID:?} is reserved for the scene root"
            )));
        }
        if map.contains_key(&e.id) {
            return Err(Error::SceneInput(format!("duplicate entity id {:?}", e.id)));
        }
        map.insert(e.id.clone(), e);
    }

    let mut support_edges: Vec<SupportEdge> = Vec::new();

    // Layouts hang off the root directly.
    let mut layout_ids: Vec<String> = map
        .values()
        .filter(|e| e.kind == EntityKind::Layout)
        .map(|e| e.id.clone())
        .collect();
    layout_ids.sort();
    for id in &layout_ids {
        support_edges.push(SupportEdge {
            parent: ROOT_ID.to_string(),
            child: id.clone(),
            plane: None,
            score: 1.0,
            floating: false,
        });
    }

    // Objects in ascending bottom height, ids as tiebreak.
    let mut object_ids: Vec<String> = map
        .values()
        .filter(|e| matches!(e.kind, EntityKind::RigidObject | EntityKind::ArticulatedObject))
        .map(|e| e.id.clone())
        .collect();
    object_ids.sort_by(|a, b| {
        let ba = map[a].obb().bottom();
        let bb = map[b].obb().bottom();
        ba.partial_cmp(&bb).unwrap().then_with(|| a.cmp(b))
    });

    let floor_id: Option<String> = {
        let mut floors: Vec<&SceneEntity> = map
            .values()
            .filter(|e| e.kind == EntityKind::Layout && e.class == "floor")
            .collect();
        floors.sort_by(|a, b| {
            a.obb()
                .bottom()
                .partial_cmp(&b.obb().bottom())
                .unwrap()
                .then_with(|| a.id.cmp(&b.id))
        });
        floors.first().map(|e| e.id.clone())
    };

    let descendants = |edges: &[SupportEdge], of: &str| -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![of.to_string()];
        while let Some(cur) = stack.pop() {
            for e in edges.iter().filter(|e| e.parent == cur) {
                if out.insert(e.child.clone()) {
                    stack.push(e.child.clone());
                }
            }
        }
        out
    };

    for id in &object_ids {
        let forbidden = descendants(&support_edges, id);
        let child = map[id].clone();
        let candidates: Vec<&SceneEntity> = map
            .values()
            .filter(|e| {
                e.id != *id
                    && e.kind != EntityKind::SceneRoot
                    && !forbidden.contains(&e.id)
            })
            .collect();
        let floor = floor_id.as_ref().and_then(|f| {
            if f != id && !forbidden.contains(f) {
                map.get(f)
            } else {
                None
            }
        });
        let choice = match infer_parent(&child, &candidates, floor, params) {
            Ok(c) => c,
            Err(Error::OrphanEntity(eid)) => {
                warnings.push(format!(
                    "entity {eid} has no supporting candidate and no floor; attached to the scene root"
                ));
                support_edges.push(SupportEdge {
                    parent: ROOT_ID.to_string(),
                    child: id.clone(),
                    plane: None,
                    score: 0.0,
                    floating: true,
                });
                continue;
            }
            Err(e) => return Err(e),
        };

        let mut floating = choice.floating;
        if !floating {
            let d = support_distance(map[id].obb(), &choice.plane);
            if d.abs() <= params.refine_max_gap {
                match refine_box(map[id].obb(), &choice.plane, id) {
                    Ok(refined) => {
                        map.get_mut(id).unwrap().bbox = Some(refined);
                    }
                    Err(_) => {
                        warnings.push(format!(
                            "entity {id}: supporting plane above box top; left floating"
                        ));
                        floating = true;
                    }
                }
            } else {
                warnings.push(format!(
                    "entity {id}: contact gap {d:.3} m exceeds refinement range; left floating"
                ));
                floating = true;
            }
        }

        if !floating {
            let ratio = support_area_ratio_with_tol(
                &map[&choice.parent].mesh,
                &choice.plane,
                map[id].obb(),
                params.plane_inlier_tol,
            )
            .unwrap_or(0.0);
            if ratio < params.b_th {
                warnings.push(format!(
                    "entity {id}: support area ratio {ratio:.2} below b_th = {}",
                    params.b_th
                ));
            }
        }

        support_edges.push(SupportEdge {
            parent: choice.parent,
            child: id.clone(),
            plane: Some(choice.plane),
            score: choice.score,
            floating,
        });
    }

    // Proximal edges among non-supporting, box-overlapping pairs.
    let mut proximal_edges = Vec::new();
    let ids: Vec<&String> = map.keys().filter(|id| id.as_str() != ROOT_ID).collect();
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            let (a, b) = (ids[i], ids[j]);
            let supported = support_edges.iter().any(|e| {
                (e.parent == **a && e.child == **b) || (e.parent == **b && e.child == **a)
            });
            if supported {
                continue;
            }
            let (ea, eb) = (&map[a.as_str()], &map[b.as_str()]);
            let (Some(ba), Some(bb)) = (ea.bbox.as_ref(), eb.bbox.as_ref()) else {
                continue;
            };
            if boxes_overlap_volume(ba, bb) > 0.0 {
                proximal_edges.push(ProximalEdge {
                    a: (*a).clone(),
                    b: (*b).clone(),
                });
            }
        }
    }
    proximal_edges.sort();

    let graph = ContactGraph {
        entities: map,
        support_edges,
        proximal_edges,
    };
    debug_assert!(graph.is_tree());
    Ok((graph, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::convex_hull_3d;
    use approx::assert_relative_eq;

    pub(crate) fn slab_mesh(center: Vec3, size: Vec3) -> TriangleMesh {
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

    pub(crate) fn box_entity(id: &str, class: &str, kind: EntityKind, center: Vec3, size: Vec3) -> SceneEntity {
        let mesh = slab_mesh(center, size);
        let bbox = OrientedBox::new(center, 0.0, size);
        let top_plane = SurfacePlane::new(Vec3::new(0.0, 0.0, 1.0), -(center.z + size.z * 0.5));
        SceneEntity {
            id: id.to_string(),
            class: class.to_string(),
            kind,
            mesh,
            mesh_path: None,
            bbox: Some(bbox),
            planes: vec![top_plane],
            replacement: None,
        }
    }

    fn floor_entity() -> SceneEntity {
        box_entity(
            "floor_0",
            "floor",
            EntityKind::Layout,
            Vec3::new(0.0, 0.0, -0.05),
            Vec3::new(6.0, 6.0, 0.1),
        )
    }

    #[test]
    fn support_distance_examples() {
        let bbox = OrientedBox::new(Vec3::new(0.0, 0.0, 1.0), 0.0, Vec3::new(0.2, 0.2, 0.4));
        let plane = SurfacePlane::new(Vec3::new(0.0, 0.0, 1.0), -0.8);
        assert_relative_eq!(support_distance(&bbox, &plane), 0.0, epsilon = 1e-12);
        let lower = SurfacePlane::new(Vec3::new(0.0, 0.0, 1.0), -0.5);
        assert_relative_eq!(support_distance(&bbox, &lower), 0.3, epsilon = 1e-12);
        let above = SurfacePlane::new(Vec3::new(0.0, 0.0, 1.0), -0.9);
        assert_relative_eq!(support_distance(&bbox, &above), -0.1, epsilon = 1e-12);
    }

    #[test]
    fn support_score_examples() {
        assert_relative_eq!(support_score(0.0, 1.0), 1.0);
        assert_relative_eq!(support_score(1.5, 0.9), 0.0);
        assert_relative_eq!(support_score(0.1, 0.8), 0.72, epsilon = 1e-12);
    }

    #[test]
    fn area_ratio_centered_and_off_edge() {
        let table = box_entity(
            "table_0",
            "table",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 0.4),
            Vec3::new(1.2, 0.8, 0.8),
        );
        let plane = table.planes[0];
        let centered = box_entity(
            "cup_0",
            "cup",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 0.85),
            Vec3::new(0.1, 0.1, 0.1),
        );
        let r = support_area_ratio(&table.mesh, &plane, &centered, 0.01).unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-9);

        let off = box_entity(
            "cup_1",
            "cup",
            EntityKind::RigidObject,
            Vec3::new(3.0, 0.0, 0.85),
            Vec3::new(0.1, 0.1, 0.1),
        );
        let r = support_area_ratio(&table.mesh, &plane, &off, 0.01).unwrap();
        assert_relative_eq!(r, 0.0, epsilon = 1e-12);

        // Box half over the table edge along +x.
        let half = box_entity(
            "box_0",
            "box",
            EntityKind::RigidObject,
            Vec3::new(0.6, 0.0, 0.9),
            Vec3::new(0.2, 0.2, 0.2),
        );
        let r = support_area_ratio(&table.mesh, &plane, &half, 0.01).unwrap();
        assert!((r - 0.5).abs() < 0.02, "ratio {r}");
    }

    #[test]
    fn degenerate_child_errors() {
        let table = floor_entity();
        let plane = table.planes[0];
        let mut degenerate = box_entity(
            "dot",
            "box",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 1.0),
        );
        degenerate.bbox = None;
        assert!(support_area_ratio(&table.mesh, &plane, &degenerate, 0.01).is_err());
    }

    #[test]
    fn cup_on_table_prefers_table_over_floor() {
        let floor = floor_entity();
        let table = box_entity(
            "table_0",
            "table",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 0.4),
            Vec3::new(1.2, 0.8, 0.8),
        );
        let cup = box_entity(
            "cup_0",
            "cup",
            EntityKind::RigidObject,
            Vec3::new(0.1, 0.0, 0.85),
            Vec3::new(0.1, 0.1, 0.1),
        );
        let params = GraphParams::default();
        let cands = [&floor, &table];
        let choice = infer_parent(&cup, &cands, Some(&floor), &params).unwrap();
        assert_eq!(choice.parent, "table_0");
        assert!(!choice.floating);
        assert!(choice.score > 0.99);
    }

    #[test]
    fn floating_book_falls_back_to_floor() {
        let floor = floor_entity();
        let book = box_entity(
            "book_0",
            "book",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 2.0),
            Vec3::new(0.2, 0.15, 0.03),
        );
        let params = GraphParams::default();
        let cands = [&floor];
        let choice = infer_parent(&book, &cands, Some(&floor), &params).unwrap();
        assert_eq!(choice.parent, "floor_0");
        assert!(choice.floating);
        assert_eq!(choice.score, 0.0);
    }

    #[test]
    fn orphan_without_floor_errors() {
        let book = box_entity(
            "book_0",
            "book",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 2.0),
            Vec3::new(0.2, 0.15, 0.03),
        );
        let params = GraphParams::default();
        assert!(matches!(
            infer_parent(&book, &[], None, &params),
            Err(Error::OrphanEntity(_))
        ));
    }

    #[test]
    fn refine_box_snaps_bottom() {
        let bbox = OrientedBox::new(Vec3::new(0.0, 0.0, 1.05), 0.3, Vec3::new(0.4, 0.3, 0.5));
        let plane = SurfacePlane::new(Vec3::new(0.0, 0.0, 1.0), -0.75);
        let refined = refine_box(&bbox, &plane, "x").unwrap();
        assert_relative_eq!(refined.bottom(), 0.75, epsilon = 1e-12);
        assert_relative_eq!(refined.top(), bbox.top(), epsilon = 1e-12);
        assert_relative_eq!(refined.size.x, bbox.size.x);
        assert_relative_eq!(support_distance(&refined, &plane), 0.0, epsilon = 1e-12);
        // Idempotent on contact.
        let again = refine_box(&refined, &plane, "x").unwrap();
        assert_relative_eq!(again.center.z, refined.center.z, epsilon = 1e-12);
    }

    #[test]
    fn refine_box_rejects_plane_above_top() {
        let bbox = OrientedBox::new(Vec3::new(0.0, 0.0, 0.5), 0.0, Vec3::new(1.0, 1.0, 1.0));
        let plane = SurfacePlane::new(Vec3::new(0.0, 0.0, 1.0), -2.0);
        assert!(refine_box(&bbox, &plane, "x").is_err());
    }

    #[test]
    fn single_table_graph() {
        let floor = floor_entity();
        let table = box_entity(
            "table_0",
            "table",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 0.4),
            Vec3::new(1.2, 0.8, 0.8),
        );
        let (graph, warnings) = build_graph(vec![floor, table], &GraphParams::default()).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        assert!(graph.is_tree());
        assert_eq!(graph.support_edges.len(), 2);
        assert_eq!(graph.parent_edge("table_0").unwrap().parent, "floor_0");
        assert!(graph.proximal_edges.is_empty());
    }

    #[test]
    fn interpenetrating_boxes_get_proximal_edge() {
        let floor = floor_entity();
        let table = box_entity(
            "table_0",
            "table",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 0.4),
            Vec3::new(1.2, 0.8, 0.8),
        );
        let a = box_entity(
            "deco_a",
            "box",
            EntityKind::RigidObject,
            Vec3::new(0.0, 0.0, 0.9),
            Vec3::new(0.3, 0.3, 0.2),
        );
        let b = box_entity(
            "deco_b",
            "box",
            EntityKind::RigidObject,
            Vec3::new(0.15, 0.0, 0.9),
            Vec3::new(0.3, 0.3, 0.2),
        );
        let (graph, _) = build_graph(vec![floor, table, a, b], &GraphParams::default()).unwrap();
        assert!(graph
            .proximal_edges
            .contains(&ProximalEdge { a: "deco_a".into(), b: "deco_b".into() }));
        // No proximal edge duplicates a support pair.
        for p in &graph.proximal_edges {
            assert!(graph.support_edges.iter().all(|s| {
                !((s.parent == p.a && s.child == p.b) || (s.parent == p.b && s.child == p.a))
            }));
        }
    }

    #[test]
    fn z_translation_invariance_of_parenting() {
        let mk = |dz: f64| {
            vec![
                box_entity(
                    "floor_0",
                    "floor",
                    EntityKind::Layout,
                    Vec3::new(0.0, 0.0, -0.05 + dz),
                    Vec3::new(6.0, 6.0, 0.1),
                ),
                box_entity(
                    "table_0",
                    "table",
                    EntityKind::RigidObject,
                    Vec3::new(0.0, 0.0, 0.4 + dz),
                    Vec3::new(1.2, 0.8, 0.8),
                ),
                box_entity(
                    "cup_0",
                    "cup",
                    EntityKind::RigidObject,
                    Vec3::new(0.1, 0.1, 0.85 + dz),
                    Vec3::new(0.1, 0.1, 0.1),
                ),
            ]
        };
        let params = GraphParams::default();
        let (g0, _) = build_graph(mk(0.0), &params).unwrap();
        let (g1, _) = build_graph(mk(2.5), &params).unwrap();
        for id in ["table_0", "cup_0"] {
            assert_eq!(
                g0.parent_edge(id).unwrap().parent,
                g1.parent_edge(id).unwrap().parent
            );
        }
    }
}
