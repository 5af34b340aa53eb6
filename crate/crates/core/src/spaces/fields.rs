//! Finite element fields and their per-triangle evaluation.

use std::fmt::Write as _;
use std::ops::Sub;

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::{Mat2, Point, Vec2};

/// Values a field can take: scalars or plane vectors.
pub trait FieldValue: Copy + Send + Sync + Sub<Output = Self> {
    fn norm_squared(self) -> f64;
}

impl FieldValue for f64 {
    fn norm_squared(self) -> f64 {
        self * self
    }
}

impl FieldValue for Vec2 {
    fn norm_squared(self) -> f64 {
        self.dot(&self)
    }
}

/// A field that can be evaluated inside each triangle. Piecewise fields may
/// be discontinuous, so the triangle is part of the query.
pub trait FieldEval: Sync {
    type Value: FieldValue;

    fn value(&self, mesh: &Mesh, tri: usize, x: Point) -> Self::Value;

    /// Like [`FieldEval::value`] but rejects points outside the triangle.
    fn eval_field(&self, mesh: &Mesh, tri: usize, x: Point) -> Result<Self::Value> {
        if tri >= mesh.num_triangles() {
            return Err(Error::InvalidArgument(format!("no triangle {tri}")));
        }
        let g = mesh.geometry(tri);
        if !g.contains(x, 1e-10) {
            return Err(Error::PointOutsideTriangle {
                triangle: tri,
                x: x.x,
                y: x.y,
            });
        }
        Ok(self.value(mesh, tri, x))
    }
}

/// A closed-form field wrapped for evaluation on a mesh.
pub struct Analytic<F>(pub F);

impl<F, V> FieldEval for Analytic<F>
where
    F: Fn(Point) -> V + Sync,
    V: FieldValue,
{
    type Value = V;

    fn value(&self, _mesh: &Mesh, _tri: usize, x: Point) -> V {
        (self.0)(x)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, found })
    }
}

/// Lowest-order Raviart–Thomas field: one flux `∫_e q·n_e` per global edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RtField {
    pub dofs: Vec<f64>,
}

impl RtField {
    pub fn zeros(mesh: &Mesh) -> Self {
        RtField {
            dofs: vec![0.0; mesh.num_edges()],
        }
    }

    pub fn new(mesh: &Mesh, dofs: Vec<f64>) -> Result<Self> {
        check_len(mesh.num_edges(), dofs.len())?;
        Ok(RtField { dofs })
    }

    /// Outward fluxes `N_k` of triangle `t` in local order.
    pub fn local_fluxes(&self, mesh: &Mesh, t: usize) -> [f64; 3] {
        let edges = mesh.triangle_edges(t);
        let signs = mesh.triangle_signs(t);
        [0, 1, 2].map(|k| signs[k] * self.dofs[edges[k]])
    }

    /// Constant divergence on triangle `t`.
    pub fn divergence(&self, mesh: &Mesh, t: usize) -> f64 {
        let n = self.local_fluxes(mesh, t);
        (n[0] + n[1] + n[2]) / mesh.geometry(t).area
    }

    pub fn sub(&self, other: &RtField) -> RtField {
        RtField {
            dofs: self.dofs.iter().zip(&other.dofs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &RtField) -> RtField {
        RtField {
            dofs: self.dofs.iter().zip(&other.dofs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> RtField {
        RtField {
            dofs: self.dofs.iter().map(|a| a * s).collect(),
        }
    }
}

/// Local basis `φ_k(x) = (x − a_k) / (2|τ|)` with outward-normal orientation.
pub fn rt_basis_eval(g: &crate::mesh::TriangleGeometry, k: usize, x: Point) -> Vec2 {
    (x - g.vertices[k]) / (2.0 * g.area)
}

impl FieldEval for RtField {
    type Value = Vec2;

    fn value(&self, mesh: &Mesh, tri: usize, x: Point) -> Vec2 {
        let g = mesh.geometry(tri);
        let n = self.local_fluxes(mesh, tri);
        (0..3).map(|k| rt_basis_eval(&g, k, x) * n[k]).sum()
    }
}

/// Piecewise constant scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct P0Field {
    pub values: Vec<f64>,
}

impl P0Field {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        check_len(mesh.num_triangles(), values.len())?;
        Ok(P0Field { values })
    }
}

impl FieldEval for P0Field {
    type Value = f64;

    fn value(&self, _mesh: &Mesh, tri: usize, _x: Point) -> f64 {
        self.values[tri]
    }
}

/// Piecewise constant vector field, e.g. a broken gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct P0VectorField {
    pub values: Vec<Vec2>,
}

impl FieldEval for P0VectorField {
    type Value = Vec2;

    fn value(&self, _mesh: &Mesh, tri: usize, _x: Point) -> Vec2 {
        self.values[tri]
    }
}

/// Scalar Crouzeix–Raviart field: one value per edge midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CrField {
    pub values: Vec<f64>,
}

impl CrField {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        check_len(mesh.num_edges(), values.len())?;
        Ok(CrField { values })
    }

    /// Constant gradient on triangle `t`: `−2 Σ u_k ∇λ_k`.
    pub fn gradient(&self, mesh: &Mesh, t: usize) -> Vec2 {
        let g = mesh.geometry(t);
        let edges = mesh.triangle_edges(t);
        (0..3).map(|k| g.grad_lambda[k] * (-2.0 * self.values[edges[k]])).sum()
    }

    /// The broken gradient as a piecewise constant field.
    pub fn broken_gradient(&self, mesh: &Mesh) -> P0VectorField {
        P0VectorField {
            values: (0..mesh.num_triangles()).map(|t| self.gradient(mesh, t)).collect(),
        }
    }
}

impl FieldEval for CrField {
    type Value = f64;

    fn value(&self, mesh: &Mesh, tri: usize, x: Point) -> f64 {
        let l = mesh.geometry(tri).barycentric(x);
        let edges = mesh.triangle_edges(tri);
        (0..3).map(|k| self.values[edges[k]] * (1.0 - 2.0 * l[k])).sum()
    }
}

/// Vector-valued Crouzeix–Raviart field: one plane vector per edge midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCrField {
    pub values: Vec<Vec2>,
}

impl FieldEval for VectorCrField {
    type Value = Vec2;

    fn value(&self, mesh: &Mesh, tri: usize, x: Point) -> Vec2 {
        let l = mesh.geometry(tri).barycentric(x);
        let edges = mesh.triangle_edges(tri);
        (0..3).map(|k| self.values[edges[k]] * (1.0 - 2.0 * l[k])).sum()
    }
}

impl VectorCrField {
    /// Constant Jacobian on triangle `t`, rows are components.
    pub fn jacobian(&self, mesh: &Mesh, t: usize) -> Mat2 {
        let g = mesh.geometry(t);
        let edges = mesh.triangle_edges(t);
        let mut j = Mat2::zeros();
        for k in 0..3 {
            j += self.values[edges[k]] * g.grad_lambda[k].transpose() * -2.0;
        }
        j
    }
}

/// Continuous piecewise linear field, one value per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Field {
    pub values: Vec<f64>,
}

impl P1Field {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self> {
        check_len(mesh.num_vertices(), values.len())?;
        Ok(P1Field { values })
    }

    pub fn gradient(&self, mesh: &Mesh, t: usize) -> Vec2 {
        let g = mesh.geometry(t);
        let tri = mesh.triangle(t);
        (0..3).map(|k| g.grad_lambda[k] * self.values[tri[k]]).sum()
    }

    /// `curl w = (∂w/∂y, −∂w/∂x)` on triangle `t`.
    pub fn curl(&self, mesh: &Mesh, t: usize) -> Vec2 {
        let d = self.gradient(mesh, t);
        Vec2::new(d.y, -d.x)
    }

    /// RT degrees of freedom of `curl w`: `w(v_max) − w(v_min)` per edge.
    pub fn curl_dofs(&self, mesh: &Mesh) -> RtField {
        RtField {
            dofs: mesh
                .edges()
                .iter()
                .map(|e| self.values[e.vertices[1]] - self.values[e.vertices[0]])
                .collect(),
        }
    }
}

impl FieldEval for P1Field {
    type Value = f64;

    fn value(&self, mesh: &Mesh, tri: usize, x: Point) -> f64 {
        let l = mesh.geometry(tri).barycentric(x);
        let v = mesh.triangle(tri);
        (0..3).map(|k| self.values[v[k]] * l[k]).sum()
    }
}

/// `index,value` rows.
pub fn scalars_to_csv(header: &str, values: &[f64]) -> String {
    let mut out = format!("{header},value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v:.17e}");
    }
    out
}

/// `index,x,y` rows.
pub fn vectors_to_csv(header: &str, values: &[Vec2]) -> String {
    let mut out = format!("{header},x,y\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{:.17e},{:.17e}", v.x, v.y);
    }
    out
}
