//! Randomized suite over the exact identities and solver cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::mesh::{generate_perturbed, generate_uniform};
use crate::solver::{
    helmholtz_split, marini_reconstruct, rt_inner, solve_cr, solve_problem, BoundaryKind, CrRhs, ProblemSpec,
};
use crate::spaces::identities::{
    commuting_diagram_check, cr_rt_interpolant_check, local_expansion_check, local_variational_identity_check,
    normal_trace_check, random_cubic_field, random_linear_field, random_triangle, random_trig_field, rt_dof_duality,
    rt_reproduction_check, IdentityDefect,
};
use crate::spaces::{Quadrature, RtField};
use crate::Vec2;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub trials: usize,
    /// Worst relative defect, or the absolute one for checks marked so.
    pub defect: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.defect <= self.tolerance
    }
}

impl std::fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<28} trials={:<4} max_defect={:.3e} tol={:.0e} {}",
            self.name,
            self.trials,
            self.defect,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn worst(defects: impl Iterator<Item = IdentityDefect>) -> f64 {
    defects.map(|d| d.relative()).fold(0.0, f64::max)
}

/// Run every oracle `trials` times with fresh random data.
pub fn verify_identities(trials: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quad = Quadrature::default();
    let high = Quadrature::high_order();
    let mut out = Vec::new();
    let mut push = |name, trials, defect, tolerance| {
        out.push(IdentityCheck {
            name,
            trials,
            defect,
            tolerance,
        })
    };

    let tris: Vec<_> = (0..trials).map(|_| random_triangle(&mut rng)).collect();
    push(
        "rt_dof_duality",
        trials,
        worst(tris.iter().map(|g| rt_dof_duality(g, &quad.edge))),
        1e-12,
    );

    let mut expansion = Vec::with_capacity(trials);
    let mut variational = Vec::with_capacity(trials);
    for g in &tris {
        let p = random_linear_field(&mut rng);
        let q = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        expansion.push(local_expansion_check(g, &p, &quad.triangle));
        variational.push(local_variational_identity_check(g, &p, q, &quad));
    }
    push("local_expansion", trials, worst(expansion.into_iter()), 1e-12);
    push(
        "local_variational_identity",
        trials,
        worst(variational.into_iter()),
        1e-12,
    );

    let mut commuting = Vec::with_capacity(trials);
    let mut cr_rt = Vec::with_capacity(trials);
    let mut traces = Vec::with_capacity(trials);
    let mut reproduction = Vec::with_capacity(trials);
    for _ in 0..trials {
        let mesh = generate_perturbed(4, 0.5, 0.3, rng.random())?;
        let q = random_trig_field(&mut rng);
        commuting.push(commuting_diagram_check(&mesh, &q, &high));
        cr_rt.push(cr_rt_interpolant_check(&mesh, random_cubic_field(&mut rng), &quad.edge));
        let field = RtField {
            dofs: (0..mesh.num_edges()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        traces.push(normal_trace_check(&mesh, &field));
        reproduction.push(rt_reproduction_check(&mesh, &field, &quad.edge));
    }
    push("commuting_diagram", trials, worst(commuting.into_iter()), 1e-12);
    push("cr_rt_interpolant", trials, worst(cr_rt.into_iter()), 1e-12);
    push("normal_trace_continuity", trials, worst(traces.into_iter()), 1e-12);
    push("rt_reproduction", trials, worst(reproduction.into_iter()), 1e-12);

    // solver-backed checks are costlier; a handful of meshes suffices
    let solves = trials.clamp(1, 5);
    let mut orth: f64 = 0.0;
    let mut curl_div: f64 = 0.0;
    for _ in 0..solves {
        let mesh = generate_perturbed(8, 0.5, 0.3, rng.random())?;
        let xi = RtField {
            dofs: (0..mesh.num_edges()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let split = helmholtz_split(&mesh, &xi, BoundaryKind::Dirichlet)?;
        orth = orth.max(rt_inner(&mesh, &split.grad_part, &split.curl_part).abs() / rt_inner(&mesh, &xi, &xi));
        for t in 0..mesh.num_triangles() {
            curl_div = curl_div.max(split.curl_part.divergence(&mesh, t).abs());
        }
    }
    push("helmholtz_orthogonality", solves, orth, 1e-10);
    push("helmholtz_curl_divergence", solves, curl_div, 1e-12);

    let mut marini: f64 = 0.0;
    let problem = ProblemSpec::poisson();
    for n in [8, 16] {
        let mesh = generate_uniform(n)?;
        let cr = solve_cr(&mesh, &*problem.f, CrRhs::Projected, &quad)?;
        let pbar = marini_reconstruct(&mesh, &cr.u, &cr.ph_f);
        let mixed = solve_problem(&mesh, &problem, &quad)?;
        for (a, b) in pbar.dofs.iter().zip(&mixed.p_h.dofs) {
            marini = marini.max((a - b).abs());
        }
    }
    push("marini_vs_mixed (abs)", 2, marini, 1e-8);
    Ok(out)
}
