//! Ranking-based coarse CAD matching.
//!
//! Every (model, orientation) candidate in the entity's semantic class is
//! scored with a matching distance combining relative box-size distance,
//! optimal plane misalignment under an injective assignment, and an
//! uprightness bias. The assignment preserves supporting planes: an
//! upward-facing entity plane may only map to an upward-facing candidate
//! plane.

use serde::{Deserialize, Serialize};

use crate::cad::{CadDatabase, OrientedFeatures};
use crate::geometry::{SurfacePlane, Vec3, GRAVITY};
use crate::graph::SceneEntity;

/// Cost charged for every entity plane left unmatched (paired with a
/// dummy column); the maximum of the normal misalignment term.
pub const DUMMY_COST: f64 = 2.0;

const INFEASIBLE: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchWeights {
    pub size: f64,
    pub plane: f64,
    pub bias: f64,
}

impl Default for MatchWeights {
    fn default() -> Self {
        // Empirical weights: size and plane terms dominate, uprightness
        // biases ties.
        MatchWeights {
            size: 1.0,
            plane: 1.0,
            bias: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchCandidate {
    pub model_id: String,
    /// Index into the 24-element orientation set.
    pub rotation: usize,
    pub matching_error: f64,
    pub size_term: f64,
    pub plane_term: f64,
    pub bias_term: f64,
    /// Per entity-plane index: matched candidate-plane index, or `None`
    /// for a dummy pairing.
    pub plane_assignment: Vec<Option<usize>>,
}

/// Entity-side features in its own box frame, precomputed once per entity.
#[derive(Debug, Clone)]
pub struct EntityMatchFeatures {
    pub size: Vec3,
    /// Planes expressed in the entity's box frame.
    pub planes: Vec<SurfacePlane>,
    /// Whether each plane is supporting-capable (upward in the world).
    pub supporting: Vec<bool>,
}

impl EntityMatchFeatures {
    pub fn from_entity(entity: &SceneEntity, a_th: f64) -> Self {
        let bbox = entity.obb();
        let planes: Vec<SurfacePlane> =
            entity.planes.iter().map(|p| p.in_box_frame(bbox)).collect();
        let supporting = entity
            .planes
            .iter()
            .map(|p| p.is_supporting(&GRAVITY, a_th))
            .collect();
        EntityMatchFeatures {
            size: bbox.size,
            planes,
            supporting,
        }
    }
}

/// Relative box-size distance, scale-invariant in each argument.
pub fn size_distance(sx: &Vec3, sy: &Vec3) -> f64 {
    (sx / sx.norm() - sy / sy.norm()).norm()
}

/// Uprightness bias `1 + g · z(y)`: 0 when upright, 2 upside down.
pub fn orientation_bias(up: &Vec3, gravity: &Vec3) -> f64 {
    1.0 + gravity.dot(up)
}

fn pair_cost(
    x_plane: &SurfacePlane,
    x_norm: f64,
    y_plane: &SurfacePlane,
    y_norm: f64,
) -> f64 {
    let offset = (x_plane.offset / x_norm - y_plane.offset / y_norm).abs();
    let normal = 1.0 - x_plane.normal.dot(&y_plane.normal);
    offset + normal
}

/// Minimum-cost injective assignment of entity planes to candidate
/// planes. Unmatched entity planes pair with dummy columns at
/// [`DUMMY_COST`], except supporting-capable planes, which must map to an
/// upward candidate plane; returns `None` when that is impossible.
pub fn solve_plane_assignment(
    cost: &[Vec<f64>],
    allow_dummy: &[bool],
) -> Option<(Vec<Option<usize>>, f64)> {
    let rows = cost.len();
    if rows == 0 {
        return Some((Vec::new(), 0.0));
    }
    let real_cols = cost[0].len();
    // Dummy columns absorb only the row surplus, so with enough candidate
    // planes the assignment is a true injection into them.
    let dummy_cols = rows.saturating_sub(real_cols);
    let cols = real_cols + dummy_cols;
    let full: Vec<Vec<f64>> = cost
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(
                (0..dummy_cols).map(|_| if allow_dummy[i] { DUMMY_COST } else { INFEASIBLE }),
            );
            r
        })
        .collect();
    let assign = hungarian(&full, cols);
    let mut out = Vec::with_capacity(rows);
    let mut total = 0.0;
    for (i, j) in assign.iter().enumerate() {
        let c = full[i][*j];
        if c >= INFEASIBLE * 0.5 {
            return None;
        }
        total += c;
        out.push(if *j < real_cols { Some(*j) } else { None });
    }
    Some((out, total))
}

/// Shortest-augmenting-path assignment (Jonker-Volgenant style) for
/// rectangular matrices with `rows <= cols`. Returns the column chosen
/// for each row.
fn hungarian(cost: &[Vec<f64>], cols: usize) -> Vec<usize> {
    let rows = cost.len();
    debug_assert!(rows <= cols);
    let inf = f64::INFINITY;
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    // p[j] = row assigned to column j (rows is the "no row" sentinel);
    // column `cols` is the virtual start column.
    let mut p = vec![rows; cols + 1];
    for i in 0..rows {
        p[cols] = i;
        let mut j0 = cols;
        let mut minv = vec![inf; cols + 1];
        let mut way = vec![cols; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = cols;
            for j in 0..cols {
                if used[j] {
                    continue;
                }
                let cur = cost[i0][j] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == rows {
                break;
            }
        }
        // Augment along the alternating path.
        while j0 != cols {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        }
    }
    let mut row_to_col = vec![cols; rows];
    for j in 0..cols {
        if p[j] != rows {
            row_to_col[p[j]] = j;
        }
    }
    row_to_col
}

/// Builds the Eq.-style cost matrix between entity and candidate planes.
fn plane_cost_matrix(
    x: &EntityMatchFeatures,
    y: &OrientedFeatures,
    a_th: f64,
) -> (Vec<Vec<f64>>, Vec<bool>) {
    let x_norm = x.size.norm();
    let y_norm = y.size.norm();
    let y_supporting: Vec<bool> = y
        .planes
        .iter()
        .map(|p| p.is_supporting(&GRAVITY, a_th))
        .collect();
    let cost = x
        .planes
        .iter()
        .zip(&x.supporting)
        .map(|(xp, &xs)| {
            y.planes
                .iter()
                .zip(&y_supporting)
                .map(|(yp, &ys)| {
                    if xs && !ys {
                        INFEASIBLE
                    } else {
                        pair_cost(xp, x_norm, yp, y_norm)
                    }
                })
                .collect()
        })
        .collect();
    let allow_dummy: Vec<bool> = x.supporting.iter().map(|s| !s).collect();
    (cost, allow_dummy)
}

/// Plane misalignment for a fixed assignment (Eq. style sum); dummy pairs
/// contribute [`DUMMY_COST`] each.
pub fn plane_misalignment(
    x: &EntityMatchFeatures,
    y: &OrientedFeatures,
    assignment: &[Option<usize>],
) -> f64 {
    let x_norm = x.size.norm();
    let y_norm = y.size.norm();
    assignment
        .iter()
        .enumerate()
        .map(|(i, j)| match j {
            Some(j) => pair_cost(&x.planes[i], x_norm, &y.planes[*j], y_norm),
            None => DUMMY_COST,
        })
        .sum()
}

#[derive(Debug, Clone)]
pub struct MatchScore {
    pub total: f64,
    pub size_term: f64,
    pub plane_term: f64,
    pub bias_term: f64,
    pub assignment: Vec<Option<usize>>,
}

/// Full matching distance `w1*d_s + w2*d_pi + w3*d_b`; `None` when the
/// support-preserving assignment is infeasible.
pub fn matching_distance(
    x: &EntityMatchFeatures,
    y: &OrientedFeatures,
    weights: &MatchWeights,
    a_th: f64,
) -> Option<MatchScore> {
    let d_s = size_distance(&x.size, &y.size);
    let d_b = orientation_bias(&y.up, &GRAVITY);
    let (cost, allow_dummy) = plane_cost_matrix(x, y, a_th);
    let (assignment, d_pi) = solve_plane_assignment(&cost, &allow_dummy)?;
    Some(MatchScore {
        total: weights.size * d_s + weights.plane * d_pi + weights.bias * d_b,
        size_term: d_s,
        plane_term: d_pi,
        bias_term: d_b,
        assignment,
    })
}

/// One row of the optional matching diagnostics dump.
#[derive(Debug, Clone, Serialize)]
pub struct MatchDiagRow {
    pub model_id: String,
    pub rotation: usize,
    pub size_term: f64,
    pub plane_term: Option<f64>,
    pub bias_term: f64,
    pub matching_error: Option<f64>,
}

/// Scores all (model, orientation) pairs in the entity's class and
/// returns the `k` best by matching error; ties break by model id, then
/// orientation index.
///
/// When `diagnostics` is false, candidates whose admissible lower bound
/// `w1*d_s + w3*d_b` already exceeds the current k-th best are skipped
/// without solving the assignment; this cannot change the returned set.
pub fn rank_candidates(
    entity: &SceneEntity,
    db: &CadDatabase,
    k: usize,
    weights: &MatchWeights,
    a_th: f64,
    diagnostics: bool,
) -> (Vec<MatchCandidate>, Vec<MatchDiagRow>) {
    let x = EntityMatchFeatures::from_entity(entity, a_th);
    let models = db.query_by_class(&entity.class);
    let mut kept: Vec<MatchCandidate> = Vec::new();
    let mut diag: Vec<MatchDiagRow> = Vec::new();
    let mut kth_best = f64::INFINITY;

    for model in models {
        for feats in db.oriented_features(&model.id) {
            let d_s = size_distance(&x.size, &feats.size);
            let d_b = orientation_bias(&feats.up, &GRAVITY);
            let lower_bound = weights.size * d_s + weights.bias * d_b;
            if !diagnostics && kept.len() >= k && lower_bound > kth_best {
                continue;
            }
            let score = matching_distance(&x, feats, weights, a_th);
            if diagnostics {
                diag.push(MatchDiagRow {
                    model_id: model.id.clone(),
                    rotation: feats.rotation,
                    size_term: d_s,
                    plane_term: score.as_ref().map(|s| s.plane_term),
                    bias_term: d_b,
                    matching_error: score.as_ref().map(|s| s.total),
                });
            }
            let Some(score) = score else { continue };
            kept.push(MatchCandidate {
                model_id: model.id.clone(),
                rotation: feats.rotation,
                matching_error: score.total,
                size_term: score.size_term,
                plane_term: score.plane_term,
                bias_term: score.bias_term,
                plane_assignment: score.assignment,
            });
            kept.sort_by(|a, b| {
                a.matching_error
                    .partial_cmp(&b.matching_error)
                    .unwrap()
                    .then_with(|| a.model_id.cmp(&b.model_id))
                    .then_with(|| a.rotation.cmp(&b.rotation))
            });
            if kept.len() > k {
                kept.truncate(k);
            }
            if kept.len() >= k {
                kth_best = kept.last().unwrap().matching_error;
            }
        }
    }
    (kept, diag)
}
