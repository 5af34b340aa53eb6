//! Crouzeix–Raviart method for `−Δu = f`, `u = 0` on the boundary, and the
//! closed-form map from its `P_h f` variant to the RT0 mixed flux.

use rayon::prelude::*;

use crate::error::Result;
use crate::mesh::Mesh;
use crate::spaces::{CrField, P0Field, Quadrature, RtField};
use crate::sparse::{solve_spd, SolveReport, SparseMatrix};
use crate::Point;

/// Right-hand side of the CR system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CrRhs {
    /// `(f, v_h)` by quadrature.
    #[default]
    Exact,
    /// `(P_h f, v_h)`, the variant that reproduces the mixed solution.
    Projected,
}

#[derive(Debug, Clone)]
pub struct CrSolution {
    pub u: CrField,
    /// `P_h f`, returned for the reconstruction.
    pub ph_f: P0Field,
    pub report: SolveReport,
}

/// Interior edges get consecutive unknown numbers; boundary edges `None`.
fn interior_numbering(mesh: &Mesh) -> (Vec<Option<usize>>, usize) {
    let mut map = vec![None; mesh.num_edges()];
    let mut n = 0;
    for e in mesh.interior_edges() {
        map[e] = Some(n);
        n += 1;
    }
    (map, n)
}

/// Solve `(∇_h u, ∇_h v) = (f, v)` (or `(P_h f, v)`) over CR functions
/// vanishing at boundary midpoints. Basis `1 − 2λ_k` has gradient `−2∇λ_k`.
pub fn solve_cr<F>(mesh: &Mesh, f: F, rhs_kind: CrRhs, quad: &Quadrature) -> Result<CrSolution>
where
    F: Fn(Point) -> f64 + Sync,
{
    let (map, n) = interior_numbering(mesh);
    let locals: Vec<(Vec<(usize, usize, f64)>, [(usize, f64); 3], f64)> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t);
            let edges = mesh.triangle_edges(t);
            let mean_f = quad.triangle.integrate(&g, &f) / g.area;
            let load = match rhs_kind {
                CrRhs::Exact => [0, 1, 2].map(|k| {
                    quad.triangle
                        .integrate(&g, |x| f(x) * (1.0 - 2.0 * g.barycentric(x)[k]))
                }),
                CrRhs::Projected => [mean_f * g.area / 3.0; 3],
            };
            let mut trip = Vec::with_capacity(9);
            for i in 0..3 {
                for j in 0..3 {
                    if let (Some(r), Some(c)) = (map[edges[i]], map[edges[j]]) {
                        trip.push((r, c, 4.0 * g.area * g.grad_lambda[i].dot(&g.grad_lambda[j])));
                    }
                }
            }
            (trip, [0, 1, 2].map(|k| (edges[k], load[k])), mean_f)
        })
        .collect();

    let mut rhs = vec![0.0; n];
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    let mut ph_f = Vec::with_capacity(mesh.num_triangles());
    for (trip, load, mean_f) in locals {
        triplets.extend(trip);
        for (e, v) in load {
            if let Some(r) = map[e] {
                rhs[r] += v;
            }
        }
        ph_f.push(mean_f);
    }
    let matrix = SparseMatrix::from_triplets(n, n, triplets)?;
    let (x, report) = solve_spd(&matrix, &rhs)?;
    let values = map.iter().map(|m| m.map_or(0.0, |r| x[r])).collect();
    Ok(CrSolution {
        u: CrField { values },
        ph_f: P0Field { values: ph_f },
        report,
    })
}

/// `p̄_h = ∇ū_h − (P_h f / 2)(x − x_τ)` as RT dofs. The field is affine, so
/// `∫_e p̄_h·n_e = ℓ_e p̄_h(m_e)·n_e`; each edge reads its first triangle.
pub fn marini_reconstruct(mesh: &Mesh, u_bar: &CrField, ph_f: &P0Field) -> RtField {
    let dofs = (0..mesh.num_edges())
        .into_par_iter()
        .map(|e| {
            let t = mesh.edge(e).first;
            let g = mesh.geometry(t);
            let m = mesh.edge_midpoint(e);
            let p = u_bar.gradient(mesh, t) - (m - g.barycenter) * (0.5 * ph_f.values[t]);
            mesh.edge_length(e) * p.dot(&mesh.edge_normal(e))
        })
        .collect();
    RtField { dofs }
}
