//! Error norms by elementwise quadrature with ordered reduction.

use rayon::prelude::*;

use crate::mesh::Mesh;
use crate::spaces::{FieldEval, FieldValue, P0Field, RtField, TriangleRule};
use crate::Point;

fn reduce(parts: Vec<f64>) -> f64 {
    parts.iter().sum::<f64>().sqrt()
}

/// `‖a − b‖_0` for two fields of the same kind.
pub fn l2_distance<A, B>(mesh: &Mesh, a: &A, b: &B, rule: &TriangleRule) -> f64
where
    A: FieldEval,
    B: FieldEval<Value = A::Value>,
{
    reduce(
        (0..mesh.num_triangles())
            .into_par_iter()
            .map(|t| {
                let g = mesh.geometry(t);
                rule.integrate(&g, |x| (a.value(mesh, t, x) - b.value(mesh, t, x)).norm_squared())
            })
            .collect(),
    )
}

/// `‖a − v‖_0` against a closed-form field.
pub fn l2_error<A, F>(mesh: &Mesh, a: &A, exact: F, rule: &TriangleRule) -> f64
where
    A: FieldEval,
    F: Fn(Point) -> A::Value + Sync,
{
    reduce(
        (0..mesh.num_triangles())
            .into_par_iter()
            .map(|t| {
                let g = mesh.geometry(t);
                rule.integrate(&g, |x| (a.value(mesh, t, x) - exact(x)).norm_squared())
            })
            .collect(),
    )
}

/// `‖div q‖_0` from the constant per-triangle divergences.
pub fn div_norm(mesh: &Mesh, q: &RtField) -> f64 {
    reduce(
        (0..mesh.num_triangles())
            .map(|t| mesh.geometry(t).area * q.divergence(mesh, t).powi(2))
            .collect(),
    )
}

pub fn p0_norm(mesh: &Mesh, v: &P0Field) -> f64 {
    reduce(
        (0..mesh.num_triangles())
            .map(|t| mesh.geometry(t).area * v.values[t].powi(2))
            .collect(),
    )
}
