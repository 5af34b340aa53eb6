//! The RT0 × P0 mixed system.
//!
//! Unknowns are ordered edges first, then triangles. With `ψ_e = s φ_k` the
//! global basis function of edge `e` seen from a triangle:
//!
//! ```text
//! row e:  (α p_h, ψ_e) − (ψ_e, β u_h) + (div ψ_e, u_h) = ⟨ψ_e·n, g⟩
//! row τ: −(div p_h, 1_τ) + (c u_h, 1_τ)                = (f, 1_τ)
//! ```

use rayon::prelude::*;

use super::problem::{BoundaryKind, ProblemSpec};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::spaces::{rt_basis_eval, FieldEval, P0Field, Quadrature, RtField};
use crate::sparse::{solve_lu, SolveReport, SparseMatrix};
use crate::{Mat2, Point, Vec2};

/// An assembled system together with its unknown layout.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub num_edges: usize,
    pub num_triangles: usize,
    /// Edges whose flux is prescribed; their rows are identity rows.
    pub fixed_edges: Vec<usize>,
    /// Whether the last triangle row was replaced by `Σ|τ| u_τ = 0`.
    pub mean_pinned: bool,
}

impl LinearSystem {
    pub fn dimension(&self) -> usize {
        self.num_edges + self.num_triangles
    }
}

#[derive(Debug, Clone)]
pub struct MixedSolution {
    pub p_h: RtField,
    pub u_h: P0Field,
    pub report: SolveReport,
}

/// `α = A⁻¹`, rejecting non-symmetric or indefinite `A`.
fn inverse_coefficient(a: Mat2, x: Point) -> Result<Mat2> {
    let asym = (a[(0, 1)] - a[(1, 0)]).abs();
    let half_trace = 0.5 * (a[(0, 0)] + a[(1, 1)]);
    let disc = (0.25 * (a[(0, 0)] - a[(1, 1)]).powi(2) + a[(0, 1)] * a[(1, 0)])
        .max(0.0)
        .sqrt();
    let lambda_min = half_trace - disc;
    if asym > 1e-12 * a.norm() || !(lambda_min > 0.0) {
        return Err(Error::NotPositiveDefinite { x: x.x, y: x.y });
    }
    a.try_inverse().ok_or(Error::NotPositiveDefinite { x: x.x, y: x.y })
}

struct LocalBlock {
    triplets: Vec<(usize, usize, f64)>,
    load: f64,
}

fn local_block(mesh: &Mesh, problem: &ProblemSpec, quad: &Quadrature, t: usize) -> Result<LocalBlock> {
    let g = mesh.geometry(t);
    let edges = mesh.triangle_edges(t);
    let s = mesh.triangle_signs(t);
    let row_t = mesh.num_edges() + t;

    let mut m = [[0.0; 3]; 3];
    let mut n = [0.0; 3];
    let mut c_int = 0.0;
    let mut load = 0.0;
    for (x, w) in quad.triangle.nodes(&g) {
        let alpha = inverse_coefficient((problem.a)(x), x)?;
        let phi = [0, 1, 2].map(|k| rt_basis_eval(&g, k, x));
        for j in 0..3 {
            let a_phi = alpha * phi[j];
            for k in 0..3 {
                m[j][k] += w * a_phi.dot(&phi[k]);
            }
        }
        if let Some(b) = &problem.b {
            let beta = alpha * b(x);
            for k in 0..3 {
                n[k] += w * phi[k].dot(&beta);
            }
        }
        if let Some(c) = &problem.c {
            c_int += w * c(x);
        }
        load += w * (problem.f)(x);
    }

    let mut triplets = Vec::with_capacity(16);
    for j in 0..3 {
        for k in 0..3 {
            triplets.push((edges[j], edges[k], s[j] * s[k] * m[j][k]));
        }
        // (div ψ_e, 1_τ) = s and −(ψ_e, β)
        triplets.push((edges[j], row_t, s[j] - s[j] * n[j]));
        triplets.push((row_t, edges[j], -s[j]));
    }
    triplets.push((row_t, row_t, c_int));
    Ok(LocalBlock { triplets, load })
}

/// Sign of the global basis function of boundary edge `e` against the
/// outward normal, and its local index in the adjacent triangle.
fn boundary_sign(mesh: &Mesh, e: usize) -> f64 {
    let t = mesh.edge(e).first;
    let k = mesh.local_index(t, e).expect("edge belongs to its first triangle");
    mesh.triangle_signs(t)[k]
}

/// Assemble the mixed system. Neumann problems come back with the flux
/// constraint already applied (see [`apply_neumann`]).
pub fn assemble_mixed(mesh: &Mesh, problem: &ProblemSpec, quad: &Quadrature) -> Result<LinearSystem> {
    let (ne, nt) = (mesh.num_edges(), mesh.num_triangles());
    let blocks: Vec<LocalBlock> = (0..nt)
        .into_par_iter()
        .map(|t| local_block(mesh, problem, quad, t))
        .collect::<Result<_>>()?;

    let mut rhs = vec![0.0; ne + nt];
    let mut triplets = Vec::with_capacity(16 * nt);
    for (t, b) in blocks.into_iter().enumerate() {
        triplets.extend(b.triplets);
        rhs[ne + t] = b.load;
    }
    if problem.bc == BoundaryKind::Dirichlet {
        for e in mesh.boundary_edges() {
            let [a, b] = mesh.edge(e).vertices;
            let n_out = mesh.outward_normal(e);
            let gint = quad
                .edge
                .integrate(mesh.vertex(a), mesh.vertex(b), |x| (problem.g)(x, n_out));
            // ψ_e·n_out = s/ℓ on the edge
            rhs[e] = boundary_sign(mesh, e) * gint / mesh.edge_length(e);
        }
    }
    let mut system = LinearSystem {
        matrix: SparseMatrix::from_triplets(ne + nt, ne + nt, triplets)?,
        rhs,
        num_edges: ne,
        num_triangles: nt,
        fixed_edges: Vec::new(),
        mean_pinned: false,
    };
    if problem.bc == BoundaryKind::Neumann {
        apply_neumann(mesh, problem, quad, &mut system)?;
    }
    Ok(system)
}

/// Prescribed boundary fluxes `∫_e p·n_e` for Neumann data.
pub fn neumann_fluxes(mesh: &Mesh, problem: &ProblemSpec, quad: &Quadrature) -> Vec<(usize, f64)> {
    mesh.boundary_edges()
        .map(|e| {
            let [a, b] = mesh.edge(e).vertices;
            let n_out = mesh.outward_normal(e);
            let gint = quad
                .edge
                .integrate(mesh.vertex(a), mesh.vertex(b), |x| (problem.g)(x, n_out));
            (e, boundary_sign(mesh, e) * gint)
        })
        .collect()
}

/// Fix the boundary fluxes to `∫_e g` and restrict the test space to
/// vanishing normal trace. Fixed columns move to the right-hand side and
/// their rows become identity rows, so the dimension is unchanged. When
/// `c ≡ 0` the last triangle row becomes the gauge `Σ|τ| u_τ = 0`.
pub fn apply_neumann(mesh: &Mesh, problem: &ProblemSpec, quad: &Quadrature, system: &mut LinearSystem) -> Result<()> {
    if !system.fixed_edges.is_empty() || system.mean_pinned {
        return Err(Error::InvalidArgument("Neumann constraint already applied".into()));
    }
    let (ne, nt) = (system.num_edges, system.num_triangles);
    let fluxes = neumann_fluxes(mesh, problem, quad);

    if problem.c_vanishes() {
        let source: f64 = system.rhs[ne..].iter().sum();
        let boundary: f64 = fluxes.iter().map(|&(e, v)| v * boundary_sign(mesh, e)).sum();
        let scale =
            system.rhs[ne..].iter().map(|v| v.abs()).sum::<f64>() + fluxes.iter().map(|(_, v)| v.abs()).sum::<f64>();
        if (source + boundary).abs() > 1e-8 * scale.max(1.0) {
            return Err(Error::IncompatibleNeumannData(source + boundary));
        }
    }

    let mut fixed = vec![None; ne];
    for &(e, v) in &fluxes {
        fixed[e] = Some(v);
    }
    let pin_row = (problem.c_vanishes() && nt > 0).then_some(ne + nt - 1);
    let mut rhs = system.rhs.clone();
    let mut triplets = Vec::with_capacity(system.matrix.nnz());
    for (i, j, v) in system.matrix.triplets() {
        if (i < ne && fixed[i].is_some()) || Some(i) == pin_row {
            continue;
        }
        match fixed.get(j).copied().flatten() {
            Some(value) => rhs[i] -= v * value,
            None => triplets.push((i, j, v)),
        }
    }
    for &(e, v) in &fluxes {
        triplets.push((e, e, 1.0));
        rhs[e] = v;
    }
    if let Some(row) = pin_row {
        for t in 0..nt {
            triplets.push((row, ne + t, mesh.geometry(t).area));
        }
        rhs[row] = 0.0;
    }
    system.matrix = SparseMatrix::from_triplets(ne + nt, ne + nt, triplets)?;
    system.rhs = rhs;
    system.fixed_edges = fluxes.iter().map(|&(e, _)| e).collect();
    system.mean_pinned = pin_row.is_some();
    Ok(())
}

pub fn solve_mixed(system: &LinearSystem) -> Result<MixedSolution> {
    let (x, report) = solve_lu(&system.matrix, &system.rhs)?;
    let ne = system.num_edges;
    Ok(MixedSolution {
        p_h: RtField { dofs: x[..ne].to_vec() },
        u_h: P0Field {
            values: x[ne..].to_vec(),
        },
        report,
    })
}

/// Assemble and solve in one step.
pub fn solve_problem(mesh: &Mesh, problem: &ProblemSpec, quad: &Quadrature) -> Result<MixedSolution> {
    solve_mixed(&assemble_mixed(mesh, problem, quad)?)
}

/// `max_e |(α(p − p_h), ψ_e) − (ψ_e, β(u − u_h)) + (div ψ_e, u − u_h)|` over
/// the test functions (all edges for Dirichlet, interior edges for Neumann),
/// with the exact `(p, u)` integrated by `quad`.
pub fn error_equation_residual(
    mesh: &Mesh,
    problem: &ProblemSpec,
    solution: &MixedSolution,
    quad: &Quadrature,
) -> Result<f64> {
    let exact = problem
        .exact
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("error equation needs an exact solution".into()))?;
    let local: Vec<[(usize, f64); 3]> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let g = mesh.geometry(t);
            let edges = mesh.triangle_edges(t);
            let s = mesh.triangle_signs(t);
            let mut r = [0.0; 3];
            for (x, w) in quad.triangle.nodes(&g) {
                let alpha = inverse_coefficient((problem.a)(x), x)?;
                let dp = alpha * ((exact.p)(x) - solution.p_h.value(mesh, t, x));
                let du = (exact.u)(x) - solution.u_h.values[t];
                let beta = problem.b.as_ref().map_or(Vec2::zeros(), |b| alpha * b(x));
                for k in 0..3 {
                    let phi = rt_basis_eval(&g, k, x);
                    r[k] += w * (dp.dot(&phi) - phi.dot(&beta) * du + du / g.area);
                }
            }
            Ok([0, 1, 2].map(|k| (edges[k], s[k] * r[k])))
        })
        .collect::<Result<_>>()?;
    let mut per_edge = vec![0.0; mesh.num_edges()];
    for block in local {
        for (e, v) in block {
            per_edge[e] += v;
        }
    }
    let neumann = problem.bc == BoundaryKind::Neumann;
    Ok((0..mesh.num_edges())
        .filter(|&e| !(neumann && mesh.edge(e).is_boundary()))
        .map(|e| per_edge[e].abs())
        .fold(0.0, f64::max))
}
