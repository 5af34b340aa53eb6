//! End-to-end acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so the PASS/FAIL lines always reach the
//! terminal; exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superconv::mesh::{generate_perturbed, generate_piecewise_uniform, generate_uniform};
use superconv::solver::{helmholtz_split, marini_reconstruct, rt_inner, solve_cr, solve_problem, CrRhs};
use superconv::study::{verify_identities, Column, ErrorReport};
use superconv::{
    run_experiment, BoundaryKind, ExperimentConfig, Mesh, MeshFamily, ProblemKind, ProblemSpec, Quadrature, RtField,
};

/// Reference uniform-grid values: `(nu, err_p, superclose, recovery)` and the
/// pairwise orders between consecutive rows.
const TABLE: [(usize, f64, f64, f64); 5] = [
    (336, 7.281e-1, 1.033e-1, 2.629e-1),
    (1312, 3.663e-1, 2.620e-2, 6.157e-2),
    (5184, 1.835e-1, 6.574e-3, 1.475e-2),
    (20608, 9.176e-2, 1.645e-3, 3.598e-3),
    (82176, 4.589e-2, 4.114e-4, 8.976e-4),
];
const TABLE_ORDERS: [(f64, f64, f64); 4] = [
    (0.9911, 1.979, 2.094),
    (0.9972, 1.995, 2.062),
    (0.9998, 1.999, 2.035),
    (0.9997, 1.999, 2.003),
];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn run(config: ExperimentConfig) -> ErrorReport {
    let report = run_experiment(&config).expect("experiment");
    if let Some(e) = &report.failure {
        panic!("level failed: {e}");
    }
    report
}

fn orders(report: &ErrorReport, c: Column) -> Vec<f64> {
    report.orders(c).into_iter().map(|o| o.unwrap_or(f64::NAN)).collect()
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn table_reproduction(uniform: &ErrorReport) -> Outcome {
    let mut ok = true;
    let mut worst = (0.0f64, 0.0f64);
    for (i, l) in uniform.levels.iter().enumerate() {
        let (nu, p, s, r) = TABLE[i];
        let tol = if i < 4 { 0.02 } else { 0.05 };
        ok &= l.nu == nu;
        for (got, want) in [(l.err_p, p), (l.err_superclose, s), (l.err_recovery, r)] {
            let d = rel(got, want);
            worst.0 = worst.0.max(d);
            ok &= d <= tol;
        }
    }
    let cols = [Column::P, Column::Superclose, Column::Recovery];
    let got: Vec<Vec<f64>> = cols.iter().map(|&c| orders(uniform, c)).collect();
    for (i, want) in TABLE_ORDERS.iter().enumerate() {
        for (k, w) in [want.0, want.1, want.2].into_iter().enumerate() {
            let d = (got[k][i] - w).abs();
            worst.1 = worst.1.max(d);
            ok &= d <= 0.05;
        }
    }
    outcome(
        ok,
        format!("worst relative error {:.2e}, worst order gap {:.4}", worst.0, worst.1),
    )
}

fn piecewise() -> Outcome {
    let report = run(ExperimentConfig {
        family: MeshFamily::Piecewise,
        levels: 5,
        ..ExperimentConfig::default()
    });
    let sc = orders(&report, Column::Superclose);
    let rec = orders(&report, Column::Recovery);
    let last_sc = *sc.last().unwrap();
    let last_rec = *rec.last().unwrap();
    let decreasing = rec.windows(2).all(|w| w[1] < w[0]);
    outcome(
        last_sc >= 1.95 && (1.45..=1.75).contains(&last_rec) && decreasing,
        format!("superclose last {last_sc:.4}; recovery orders {}", fmt(&rec)),
    )
}

fn perturbed() -> Outcome {
    let slope = |alpha: f64| {
        run(ExperimentConfig {
            family: MeshFamily::Perturbed,
            alpha,
            levels: 4,
            ..ExperimentConfig::default()
        })
        .slope(Column::Superclose)
        .unwrap_or(f64::NAN)
    };
    let (half, one) = (slope(0.5), slope(1.0));
    outcome(
        (1.35..=1.65).contains(&half) && (1.85..=2.1).contains(&one),
        format!("least-squares order alpha=0.5: {half:.4}, alpha=1: {one:.4}"),
    )
}

fn divergence() -> Outcome {
    let report = run(ExperimentConfig {
        family: MeshFamily::Perturbed,
        levels: 4,
        ..ExperimentConfig::default()
    });
    let ord = orders(&report, Column::Div);
    let exact = run(ExperimentConfig {
        family: MeshFamily::Perturbed,
        problem: ProblemKind::MixedPoisson,
        levels: 4,
        triangle_degree: 20,
        edge_points: 12,
        ..ExperimentConfig::default()
    });
    let worst = exact.column(Column::Div).into_iter().fold(0.0, f64::max);
    outcome(
        min(&ord) >= 1.9 && worst <= 1e-12,
        format!("orders with c=1 {}; max with b=0, c=0 {worst:.2e}", fmt(&ord)),
    )
}

fn primal(uniform: &ErrorReport) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for family in [MeshFamily::Piecewise, MeshFamily::Perturbed] {
        let report = run(ExperimentConfig {
            family,
            levels: 4,
            ..ExperimentConfig::default()
        });
        let ord = orders(&report, Column::U);
        ok &= min(&ord) >= 1.9;
        parts.push(format!("{family} {}", fmt(&ord)));
    }
    let ord = orders(uniform, Column::U);
    ok &= min(&ord) >= 1.9;
    parts.insert(0, format!("uniform {}", fmt(&ord)));
    outcome(ok, parts.join("; "))
}

fn identities() -> Outcome {
    let start = Instant::now();
    let checks = verify_identities(100, 2024).expect("identity suite");
    let wanted = [
        "rt_dof_duality",
        "cr_rt_interpolant",
        "local_expansion",
        "local_variational_identity",
        "commuting_diagram",
    ];
    let selected: Vec<_> = checks.iter().filter(|c| wanted.contains(&c.name)).collect();
    let worst = selected.iter().map(|c| c.defect).fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        selected.len() == wanted.len()
            && selected.iter().all(|c| c.trials == 100 && c.defect <= 1e-12)
            && elapsed < 10.0,
        format!("worst relative defect {worst:.2e} over 100 trials each, {elapsed:.1}s"),
    )
}

fn marini() -> Outcome {
    let quad = Quadrature::default();
    let problem = ProblemSpec::poisson();
    let mut worst: f64 = 0.0;
    for n in [8, 16] {
        let mesh = generate_uniform(n).unwrap();
        let cr = solve_cr(&mesh, &*problem.f, CrRhs::Projected, &quad).unwrap();
        let pbar = marini_reconstruct(&mesh, &cr.u, &cr.ph_f);
        let mixed = solve_problem(&mesh, &problem, &quad).unwrap();
        for (a, b) in pbar.dofs.iter().zip(&mixed.p_h.dofs) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(worst <= 1e-8, format!("max dof difference {worst:.2e}"))
}

fn helmholtz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut meshes: Vec<Mesh> = Vec::new();
    for n in [4, 8, 16] {
        meshes.push(generate_uniform(n).unwrap());
        meshes.push(generate_piecewise_uniform(n).unwrap());
        meshes.push(generate_perturbed(n, 0.5, 1.0, rng.random()).unwrap());
    }
    let (mut orth, mut div, mut dims): (f64, f64, bool) = (0.0, 0.0, true);
    for mesh in &meshes {
        dims &= mesh.num_edges() == mesh.num_triangles() + mesh.num_vertices() - 1;
        for kind in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
            let mut xi = RtField {
                dofs: (0..mesh.num_edges()).map(|_| rng.random_range(-1.0..1.0)).collect(),
            };
            if kind == BoundaryKind::Neumann {
                for e in mesh.boundary_edges() {
                    xi.dofs[e] = 0.0;
                }
            }
            let split = helmholtz_split(mesh, &xi, kind).unwrap();
            orth = orth.max(rt_inner(mesh, &split.grad_part, &split.curl_part).abs() / rt_inner(mesh, &xi, &xi));
            for t in 0..mesh.num_triangles() {
                div = div.max(split.curl_part.divergence(mesh, t).abs());
            }
        }
    }
    let report = run(ExperimentConfig {
        levels: 4,
        helmholtz: true,
        ..ExperimentConfig::default()
    });
    let ord = orders(&report, Column::GradPart);
    outcome(
        orth <= 1e-10 && div <= 1e-12 && dims && min(&ord) >= 1.9,
        format!(
            "orthogonality {orth:.2e}, curl-part div {div:.2e}, E=T+V-1 {dims}; grad-part orders {}",
            fmt(&ord)
        ),
    )
}

fn cr_recovery() -> Outcome {
    let report = run(ExperimentConfig {
        problem: ProblemKind::Cr,
        levels: 4,
        ..ExperimentConfig::default()
    });
    let ord = orders(&report, Column::Recovery);
    outcome(min(&ord) >= 1.9, format!("recovered gradient orders {}", fmt(&ord)))
}

fn effectivity(uniform: &ErrorReport) -> Outcome {
    let level = uniform.levels.iter().find(|l| l.nu == 20608).expect("nu = 20608 level");
    let eff = level.effectivity;
    outcome(
        (0.95..=1.05).contains(&eff),
        format!("effectivity {eff:.4} at nu=20608"),
    )
}

fn convection() -> Outcome {
    let report = run(ExperimentConfig {
        problem: ProblemKind::MixedConvection,
        levels: 4,
        ..ExperimentConfig::default()
    });
    let ord = orders(&report, Column::Superclose);
    outcome(min(&ord) >= 1.9, format!("superclose orders {}", fmt(&ord)))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    // `cargo test -- --list` and filters pass arguments; nothing to list here
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let uniform = run(ExperimentConfig {
        levels: 5,
        ..ExperimentConfig::default()
    });
    let criteria: Vec<Criterion> = vec![
        ("uniform-grid table", Box::new(|| table_reproduction(&uniform))),
        ("piecewise-uniform family", Box::new(piecewise)),
        ("perturbed family", Box::new(perturbed)),
        ("divergence of supercloseness error", Box::new(divergence)),
        ("primal supercloseness", Box::new(|| primal(&uniform))),
        ("identity oracles", Box::new(identities)),
        ("Marini cross-check", Box::new(marini)),
        ("Helmholtz split", Box::new(helmholtz)),
        ("CR superconvergence", Box::new(cr_recovery)),
        ("estimator effectivity", Box::new(|| effectivity(&uniform))),
        ("convection/reaction robustness", Box::new(convection)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  {}",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
