use super::Mesh;
use crate::error::Result;

/// Red refinement: every triangle is split into four similar children
/// through its edge midpoints. New vertex `V + e` is the midpoint of edge `e`.
pub fn refine_regular(mesh: &Mesh) -> Result<Mesh> {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices().to_vec();
    vertices.extend((0..mesh.num_edges()).map(|e| mesh.edge_midpoint(e)));
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for t in 0..mesh.num_triangles() {
        let [a0, a1, a2] = mesh.triangle(t);
        let [e0, e1, e2] = mesh.triangle_edges(t);
        let (m0, m1, m2) = (nv + e0, nv + e1, nv + e2);
        triangles.push([a0, m2, m1]);
        triangles.push([m2, a1, m0]);
        triangles.push([m1, m0, a2]);
        triangles.push([m0, m1, m2]);
    }
    Mesh::new(vertices, triangles)
}
