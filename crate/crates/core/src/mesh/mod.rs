//! Triangulations of polygonal domains.
//!
//! A [`Mesh`] owns its vertices and counterclockwise triangles and derives a
//! globally oriented edge list on construction. Edges are stored as
//! `(v_min, v_max)`; the global tangent runs from `v_min` to `v_max` and the
//! global normal is that tangent turned clockwise by a quarter. Each triangle
//! records, for its local edge `k` (opposite local vertex `k`), the global
//! edge index and a sign that is `+1` when the global normal is the
//! triangle's outward normal.

mod analyze;
mod generate;
mod geometry;
mod io;
mod refine;

pub use analyze::{analyze_structure, expected_rate, parallelogram_deviation, LevelStructure, MeshStructureReport};
pub use generate::{generate_perturbed, generate_piecewise_uniform, generate_uniform};
pub use geometry::TriangleGeometry;
pub use io::{read_mesh, write_mesh};
pub use refine::refine_regular;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::{Point, Vec2};

/// A globally oriented edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    /// `(v_min, v_max)`.
    pub vertices: [usize; 2],
    /// The first triangle that referenced this edge.
    pub first: usize,
    /// The neighbour across the edge, `None` on the boundary.
    pub second: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.second.is_none()
    }

    /// The triangle across this edge from `tri`.
    pub fn other(&self, tri: usize) -> Option<usize> {
        if self.first == tri {
            self.second
        } else if self.second == Some(tri) {
            Some(self.first)
        } else {
            None
        }
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.vertices[0] == v || self.vertices[1] == v
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
    tri_signs: Vec<[f64; 3]>,
    boundary_vertex: Vec<bool>,
}

impl Mesh {
    /// Builds a mesh and derives its edges. Triangles must be counterclockwise
    /// and the triangulation must cover a simply connected domain.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidArgument("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidArgument(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if !(area > 0.0) {
                return Err(Error::InvertedTriangle { index: t, area });
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges: Vec<Edge> = Vec::with_capacity(triangles.len() * 3 / 2 + 2);
        let mut tri_edges = Vec::with_capacity(triangles.len());
        let mut tri_signs = Vec::with_capacity(triangles.len());

        for (t, tri) in triangles.iter().enumerate() {
            let mut local_edges = [0usize; 3];
            let mut local_signs = [0.0; 3];
            for k in 0..3 {
                let from = tri[(k + 1) % 3];
                let to = tri[(k + 2) % 3];
                let key = (from.min(to), from.max(to));
                let sign = if from < to { 1.0 } else { -1.0 };
                let index = match lookup.get(&key) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.second.is_some() {
                            return Err(Error::NonManifoldEdge(key.0, key.1));
                        }
                        edge.second = Some(t);
                        e
                    }
                    None => {
                        lookup.insert(key, edges.len());
                        edges.push(Edge {
                            vertices: [key.0, key.1],
                            first: t,
                            second: None,
                        });
                        edges.len() - 1
                    }
                };
                local_edges[k] = index;
                local_signs[k] = sign;
            }
            tri_edges.push(local_edges);
            tri_signs.push(local_signs);
        }

        let mut boundary_vertex = vec![false; vertices.len()];
        for edge in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[edge.vertices[0]] = true;
            boundary_vertex[edge.vertices[1]] = true;
        }

        let mesh = Mesh {
            vertices,
            triangles,
            edges,
            tri_edges,
            tri_signs,
            boundary_vertex,
        };
        mesh.check_orientation()?;
        let euler = mesh.euler_characteristic();
        if euler != 1 {
            return Err(Error::EulerViolation(euler));
        }
        Ok(mesh)
    }

    fn check_orientation(&self) -> Result<()> {
        for (e, edge) in self.edges.iter().enumerate() {
            if let Some(second) = edge.second {
                let s1 = self.sign_of(edge.first, e);
                let s2 = self.sign_of(second, e);
                if s1 * s2 > 0.0 {
                    return Err(Error::InconsistentOrientation(edge.vertices[0], edge.vertices[1]));
                }
            }
        }
        Ok(())
    }

    fn sign_of(&self, tri: usize, edge: usize) -> f64 {
        let k = self.local_index(tri, edge).expect("edge belongs to triangle");
        self.tri_signs[tri][k]
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    /// Global edge indices of triangle `t`; entry `k` is opposite local vertex `k`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    /// Orientation signs matching [`Mesh::triangle_edges`].
    pub fn triangle_signs(&self, t: usize) -> [f64; 3] {
        self.tri_signs[t]
    }

    /// Local position of global edge `e` in triangle `t`.
    pub fn local_index(&self, t: usize, e: usize) -> Option<usize> {
        self.tri_edges[t].iter().position(|&x| x == e)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edges[e].is_boundary())
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| !self.edges[e].is_boundary())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn geometry(&self, t: usize) -> TriangleGeometry {
        let [a, b, c] = self.triangles[t];
        TriangleGeometry::new(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    /// Alias of [`Mesh::geometry`].
    pub fn triangle_geometry(&self, t: usize) -> TriangleGeometry {
        self.geometry(t)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[b] - self.vertices[a]).norm()
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[a] + self.vertices[b]) * 0.5
    }

    /// Unit tangent from `v_min` to `v_max`.
    pub fn edge_tangent(&self, e: usize) -> Vec2 {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[b] - self.vertices[a]).normalize()
    }

    /// Unit global normal: the tangent turned clockwise.
    pub fn edge_normal(&self, e: usize) -> Vec2 {
        let t = self.edge_tangent(e);
        Vec2::new(t.y, -t.x)
    }

    /// Outward unit normal of a boundary edge.
    pub fn outward_normal(&self, e: usize) -> Vec2 {
        let edge = &self.edges[e];
        self.edge_normal(e) * self.sign_of(edge.first, e)
    }

    /// Mesh size: the largest triangle diameter.
    pub fn max_diameter(&self) -> f64 {
        (0..self.edges.len()).map(|e| self.edge_length(e)).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.geometry(t).area).sum()
    }
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
}
