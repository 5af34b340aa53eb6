//! Canonical interpolants: Π_h onto RT0, P_h onto P0, I_h^CR onto CR.

use rayon::prelude::*;

use super::fields::{CrField, FieldEval, P0Field, RtField, VectorCrField};
use super::quadrature::{EdgeRule, TriangleRule};
use crate::mesh::Mesh;
use crate::{Point, Vec2};

/// Π_h q: each dof is `∫_e q·n_e` with the global normal.
pub fn interpolate_rt<F>(mesh: &Mesh, rule: &EdgeRule, q: F) -> RtField
where
    F: Fn(Point) -> Vec2 + Sync,
{
    interpolate_rt_piecewise(mesh, rule, |_, x| q(x))
}

/// Π_h of a field given per triangle; each edge uses its first triangle.
pub fn interpolate_rt_piecewise<F>(mesh: &Mesh, rule: &EdgeRule, q: F) -> RtField
where
    F: Fn(usize, Point) -> Vec2 + Sync,
{
    let dofs = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let edge = mesh.edge(e);
            let [a, b] = edge.vertices;
            let n = mesh.edge_normal(e);
            rule.integrate(mesh.vertex(a), mesh.vertex(b), |x| q(edge.first, x).dot(&n))
        })
        .collect();
    RtField { dofs }
}

/// Π_h applied to any evaluable vector field.
pub fn interpolate_rt_field<F>(mesh: &Mesh, rule: &EdgeRule, field: &F) -> RtField
where
    F: FieldEval<Value = Vec2>,
{
    interpolate_rt_piecewise(mesh, rule, |t, x| field.value(mesh, t, x))
}

/// P_h v: triangle means.
pub fn project_p0<F>(mesh: &Mesh, rule: &TriangleRule, v: F) -> P0Field
where
    F: Fn(Point) -> f64 + Sync,
{
    let values = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t);
            rule.integrate(&g, &v) / g.area
        })
        .collect();
    P0Field { values }
}

/// I_h^CR q for vector fields: the midpoint value on each edge is the edge mean.
pub fn interpolate_cr<F>(mesh: &Mesh, rule: &EdgeRule, q: F) -> VectorCrField
where
    F: Fn(Point) -> Vec2 + Sync,
{
    let values = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let [a, b] = mesh.edge(e).vertices;
            rule.integrate(mesh.vertex(a), mesh.vertex(b), &q) / mesh.edge_length(e)
        })
        .collect();
    VectorCrField { values }
}

/// Scalar I_h^CR.
pub fn interpolate_cr_scalar<F>(mesh: &Mesh, rule: &EdgeRule, u: F) -> CrField
where
    F: Fn(Point) -> f64 + Sync,
{
    let values = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let [a, b] = mesh.edge(e).vertices;
            rule.integrate(mesh.vertex(a), mesh.vertex(b), &u) / mesh.edge_length(e)
        })
        .collect();
    CrField { values }
}
