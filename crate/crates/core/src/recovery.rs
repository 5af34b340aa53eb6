//! Edge-midpoint recovery `G_h` and the estimator `‖G_h p_h − p_h‖`.
//!
//! Interior midpoints take the average of the two one-sided values. A
//! boundary edge `e` of `τ` is extrapolated through a neighbouring pair:
//! `e′` is an interior edge of `τ`, `τ′` the triangle across it, `e″` the
//! edge of `τ′` sharing no vertex with `e`, and
//! `G_h q(m) = 2 G_h q(m′) − G_h q(m″)`. When `τ` has two interior edges the
//! one whose midpoint comes first in `(x, y)` order is tried first.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::mesh::Mesh;
use crate::spaces::{FieldEval, Quadrature, RtField, VectorCrField};
use crate::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredField {
    pub field: VectorCrField,
    /// Boundary edges that fell back to the one-sided value.
    pub fallback_edges: Vec<usize>,
}

/// The extrapolation pair `(e′, e″)` for boundary edge `e`, or `None` when
/// the patch leaves the mesh.
pub fn boundary_patch(mesh: &Mesh, e: usize) -> Option<(usize, usize)> {
    let edge = mesh.edge(e);
    let tau = edge.first;
    let [a, b] = edge.vertices;
    let mut candidates: Vec<usize> = mesh
        .triangle_edges(tau)
        .into_iter()
        .filter(|&k| !mesh.edge(k).is_boundary())
        .collect();
    candidates.sort_by(|&i, &j| midpoint_order(mesh, i, j));
    candidates.into_iter().find_map(|e1| {
        let tau1 = mesh.edge(e1).other(tau)?;
        let e2 = mesh
            .triangle_edges(tau1)
            .into_iter()
            .find(|&k| !mesh.edge(k).contains_vertex(a) && !mesh.edge(k).contains_vertex(b))?;
        (!mesh.edge(e2).is_boundary()).then_some((e1, e2))
    })
}

/// Orders edges by midpoint, x first then y. Labels play no part, so the
/// choice of `e′` survives any renumbering of vertices or edges.
fn midpoint_order(mesh: &Mesh, i: usize, j: usize) -> std::cmp::Ordering {
    let (a, b) = (mesh.edge_midpoint(i), mesh.edge_midpoint(j));
    let tol = 1e-12 * mesh.edge_length(i).max(mesh.edge_length(j));
    if (a.x - b.x).abs() > tol {
        a.x.total_cmp(&b.x)
    } else {
        a.y.total_cmp(&b.y)
    }
}

/// Apply `G_h` to any per-triangle evaluable vector field.
pub fn apply_gh<F>(mesh: &Mesh, q: &F) -> RecoveredField
where
    F: FieldEval<Value = Vec2>,
{
    let mut values: Vec<Vec2> = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let edge = mesh.edge(e);
            let m = mesh.edge_midpoint(e);
            let one = q.value(mesh, edge.first, m);
            match edge.second {
                Some(t) => (one + q.value(mesh, t, m)) * 0.5,
                None => one,
            }
        })
        .collect();

    let boundary: Vec<usize> = mesh.boundary_edges().collect();
    let extrapolated: Vec<Option<Vec2>> = boundary
        .par_iter()
        .map(|&e| boundary_patch(mesh, e).map(|(e1, e2)| values[e1] * 2.0 - values[e2]))
        .collect();
    let mut fallback_edges = Vec::new();
    for (&e, v) in boundary.iter().zip(extrapolated) {
        match v {
            Some(v) => values[e] = v,
            None => {
                log::warn!("boundary edge {e}: incomplete recovery patch, using the one-sided value");
                fallback_edges.push(e);
            }
        }
    }
    RecoveredField {
        field: VectorCrField { values },
        fallback_edges,
    }
}

#[derive(Debug, Clone)]
pub struct EstimatorReport {
    pub eta: f64,
    pub per_triangle: Vec<f64>,
    pub recovered: RecoveredField,
}

impl EstimatorReport {
    /// `triangle,eta` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("triangle,eta\n");
        for (t, v) in self.per_triangle.iter().enumerate() {
            let _ = writeln!(out, "{t},{v:.17e}");
        }
        out
    }
}

/// `η_τ = ‖G_h p_h − p_h‖_{0,τ}` and `η = (Σ η_τ²)^{1/2}`.
pub fn estimator(mesh: &Mesh, p_h: &RtField, quad: &Quadrature) -> EstimatorReport {
    let recovered = apply_gh(mesh, p_h);
    let per_triangle: Vec<f64> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t);
            quad.triangle
                .integrate(&g, |x| {
                    (recovered.field.value(mesh, t, x) - p_h.value(mesh, t, x)).norm_squared()
                })
                .sqrt()
        })
        .collect();
    let eta = per_triangle.iter().map(|v| v * v).sum::<f64>().sqrt();
    EstimatorReport {
        eta,
        per_triangle,
        recovered,
    }
}
