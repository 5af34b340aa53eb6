//! Discrete Helmholtz decomposition `Q_h = grad_h V_h ⊕ curl S_h`.

use rayon::prelude::*;

use super::problem::BoundaryKind;
use crate::error::Result;
use crate::mesh::Mesh;
use crate::spaces::{rt_basis_eval, FieldEval, P0Field, P1Field, RtField, TriangleRule};
use crate::sparse::{solve_spd, SparseMatrix};

#[derive(Debug, Clone)]
pub struct HelmholtzSplit {
    pub xi: RtField,
    /// Stream function: zero mean (Dirichlet) or zero trace (Neumann).
    pub w: P1Field,
    pub curl_part: RtField,
    pub grad_part: RtField,
    /// Potential with `grad_h v = grad_part`, i.e. `(grad_part, q) = −(v, div q)`.
    pub v: P0Field,
}

/// `(a, b)_{L²}` for RT fields; degree 2 integrands are exact with the
/// degree 5 rule.
pub fn rt_inner(mesh: &Mesh, a: &RtField, b: &RtField) -> f64 {
    let rule = TriangleRule::degree5();
    let parts: Vec<f64> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t);
            rule.integrate(&g, |x| a.value(mesh, t, x).dot(&b.value(mesh, t, x)))
        })
        .collect();
    parts.iter().sum()
}

/// Solve the P1 system `(∇w, ∇s) = (ξ, curl s)`. Dirichlet: the last vertex
/// is pinned and the mean removed afterwards. Neumann: `w = 0` on the
/// boundary.
fn stream_function(mesh: &Mesh, xi: &RtField, kind: BoundaryKind) -> Result<P1Field> {
    let nv = mesh.num_vertices();
    let mut map: Vec<Option<usize>> = vec![None; nv];
    let mut n = 0;
    for (v, slot) in map.iter_mut().enumerate() {
        let free = match kind {
            BoundaryKind::Dirichlet => v + 1 < nv,
            BoundaryKind::Neumann => !mesh.is_boundary_vertex(v),
        };
        if free {
            *slot = Some(n);
            n += 1;
        }
    }
    let locals: Vec<(Vec<(usize, usize, f64)>, [(usize, f64); 3])> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t);
            let tri = mesh.triangle(t);
            // ξ is affine, curl λ_i constant: ∫ξ·curl λ_i = |τ| ξ(x_τ)·curl λ_i
            let xi_mean = xi.value(mesh, t, g.barycenter);
            let mut trip = Vec::with_capacity(9);
            for i in 0..3 {
                for j in 0..3 {
                    if let (Some(r), Some(c)) = (map[tri[i]], map[tri[j]]) {
                        trip.push((r, c, g.area * g.grad_lambda[i].dot(&g.grad_lambda[j])));
                    }
                }
            }
            let load = [0, 1, 2].map(|i| {
                let d = g.grad_lambda[i];
                (tri[i], g.area * xi_mean.dot(&crate::Vec2::new(d.y, -d.x)))
            });
            (trip, load)
        })
        .collect();
    let mut rhs = vec![0.0; n];
    let mut triplets = Vec::new();
    for (trip, load) in locals {
        triplets.extend(trip);
        for (v, val) in load {
            if let Some(r) = map[v] {
                rhs[r] += val;
            }
        }
    }
    let mut values = vec![0.0; nv];
    if n > 0 {
        let (x, _) = solve_spd(&SparseMatrix::from_triplets(n, n, triplets)?, &rhs)?;
        for (v, slot) in map.iter().enumerate() {
            if let Some(r) = slot {
                values[v] = x[*r];
            }
        }
    }
    if kind == BoundaryKind::Dirichlet {
        let mut integral = 0.0;
        for t in 0..mesh.num_triangles() {
            let tri = mesh.triangle(t);
            integral += mesh.geometry(t).area * tri.iter().map(|&v| values[v]).sum::<f64>() / 3.0;
        }
        let mean = integral / mesh.total_area();
        values.iter_mut().for_each(|v| *v -= mean);
    }
    Ok(P1Field { values })
}

/// Solve `B Bᵀ v = −B M g` where `B_{τe} = (div ψ_e, 1_τ)`, `M` is the RT
/// mass matrix and `g` the gradient part. In the Neumann variant only
/// interior edges enter `B` and one triangle is pinned, then the mean is
/// removed.
fn potential(mesh: &Mesh, grad_part: &RtField, kind: BoundaryKind) -> Result<P0Field> {
    let nt = mesh.num_triangles();
    let rule = TriangleRule::degree5();
    // (M g)_e = Σ_τ s ∫ g·φ_k
    let mut mg = vec![0.0; mesh.num_edges()];
    for t in 0..nt {
        let g = mesh.geometry(t);
        let edges = mesh.triangle_edges(t);
        let s = mesh.triangle_signs(t);
        for k in 0..3 {
            mg[edges[k]] += s[k] * rule.integrate(&g, |x| grad_part.value(mesh, t, x).dot(&rt_basis_eval(&g, k, x)));
        }
    }
    let neumann = kind == BoundaryKind::Neumann;
    let pinned = neumann.then_some(nt - 1);
    let index = |t: usize| -> Option<usize> {
        match pinned {
            Some(p) if t == p => None,
            Some(p) if t > p => Some(t - 1),
            _ => Some(t),
        }
    };
    let n = nt - usize::from(neumann);
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n];
    for e in 0..mesh.num_edges() {
        let edge = mesh.edge(e);
        if neumann && edge.is_boundary() {
            continue;
        }
        let sides: Vec<(usize, f64)> = std::iter::once(edge.first)
            .chain(edge.second)
            .map(|t| (t, mesh.triangle_signs(t)[mesh.local_index(t, e).unwrap()]))
            .collect();
        for &(t1, s1) in &sides {
            let Some(r) = index(t1) else { continue };
            rhs[r] -= s1 * mg[e];
            for &(t2, s2) in &sides {
                if let Some(c) = index(t2) {
                    triplets.push((r, c, s1 * s2));
                }
            }
        }
    }
    let (x, _) = solve_spd(&SparseMatrix::from_triplets(n, n, triplets)?, &rhs)?;
    let mut values: Vec<f64> = (0..nt).map(|t| index(t).map_or(0.0, |r| x[r])).collect();
    if neumann {
        let total: f64 = (0..nt).map(|t| mesh.geometry(t).area * values[t]).sum();
        let mean = total / mesh.total_area();
        values.iter_mut().for_each(|v| *v -= mean);
    }
    Ok(P0Field { values })
}

/// Split `ξ_h` into `grad_h v_h + curl w_h`. For the Neumann variant `ξ_h`
/// is expected to have vanishing boundary flux.
pub fn helmholtz_split(mesh: &Mesh, xi: &RtField, kind: BoundaryKind) -> Result<HelmholtzSplit> {
    let w = stream_function(mesh, xi, kind)?;
    let curl_part = w.curl_dofs(mesh);
    let grad_part = xi.sub(&curl_part);
    let v = potential(mesh, &grad_part, kind)?;
    Ok(HelmholtzSplit {
        xi: xi.clone(),
        w,
        curl_part,
        grad_part,
        v,
    })
}
