mod common;

use std::collections::HashMap;

use common::{build, key, renumbered, Family};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superconv::mesh::{generate_perturbed, generate_uniform};
use superconv::recovery::boundary_patch;
use superconv::spaces::identities::random_linear_field;
use superconv::spaces::{interpolate_rt, EdgeRule, Quadrature, RtField, TriangleRule};
use superconv::study::{l2_error, least_squares_slope};
use superconv::{apply_gh, estimator, Mesh, Point, Vec2};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Uniform),
        Just(Family::Piecewise),
        (0.5f64..2.0, 0.0f64..1.0, any::<u64>()).prop_map(|(alpha, amplitude, seed)| Family::Perturbed {
            alpha,
            amplitude,
            seed
        }),
    ]
}

fn random_rt(mesh: &Mesh, rng: &mut ChaCha8Rng) -> RtField {
    RtField {
        dofs: (0..mesh.num_edges()).map(|_| rng.random_range(-1.0..1.0)).collect(),
    }
}

/// Area of the patch behind the recovered value at `e`: the two triangles
/// sharing an interior edge, or `τ ∪ τ′ ∪ τ″` for a boundary edge.
fn patch_area(mesh: &Mesh, e: usize) -> f64 {
    let edge = mesh.edge(e);
    let area = |t: usize| mesh.geometry(t).area;
    match (edge.second, boundary_patch(mesh, e)) {
        (Some(t), _) => area(edge.first) + area(t),
        (None, Some((e1, e2))) => {
            let t1 = mesh.edge(e1).other(edge.first).unwrap();
            let t2 = mesh.edge(e2).other(t1).unwrap();
            area(edge.first) + area(t1) + area(t2)
        }
        (None, None) => area(edge.first),
    }
}

/// Largest `|G_h Π_h q_L (m) − q_L(m)| / ‖∇q_L‖_{0,ω}` over all midpoints.
fn linear_defect(mesh: &Mesh, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_linear_field(&mut rng);
    let q = move |x: Point| p.constant + p.gradient * x;
    let rec = apply_gh(mesh, &interpolate_rt(mesh, &EdgeRule::default(), q));
    (0..mesh.num_edges())
        .map(|e| {
            let defect = (rec.field.values[e] - q(mesh.edge_midpoint(e))).norm();
            defect / (p.gradient.norm() * patch_area(mesh, e).sqrt())
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn recovery_is_linear(fam in family(), n in 2usize..8, seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mesh = build(fam, n, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (q, r) = (random_rt(&mesh, &mut rng), random_rt(&mesh, &mut rng));
        let combined = apply_gh(&mesh, &q.scale(a).add(&r.scale(b)));
        let (gq, gr) = (apply_gh(&mesh, &q), apply_gh(&mesh, &r));
        for e in 0..mesh.num_edges() {
            let want = gq.field.values[e] * a + gr.field.values[e] * b;
            prop_assert!((combined.field.values[e] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn constants_are_reproduced(fam in family(), n in 2usize..8, cx in -3.0f64..3.0, cy in -3.0f64..3.0) {
        let mesh = build(fam, n, 0);
        let c = Vec2::new(cx, cy);
        let rec = apply_gh(&mesh, &interpolate_rt(&mesh, &EdgeRule::default(), |_| c));
        for v in &rec.field.values {
            prop_assert!((v - c).norm() <= 1e-12 * (1.0 + c.norm()));
        }
    }

    #[test]
    fn recovery_is_bounded_in_l2(fam in family(), n in 2usize..10, seed in any::<u64>()) {
        let mesh = build(fam, n, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_rt(&mesh, &mut rng);
        let rule = TriangleRule::default();
        let ratio = l2_error(&mesh, &apply_gh(&mesh, &q).field, |_| Vec2::zeros(), &rule)
            / l2_error(&mesh, &q, |_| Vec2::zeros(), &rule);
        prop_assert!(ratio <= 10.0, "ratio {}", ratio);
    }

    #[test]
    fn recovery_and_estimator_ignore_labels(fam in family(), n in 2usize..8, seed in any::<u64>()) {
        let a = build(fam, n, 0);
        let b = renumbered(&a, seed);
        let field = |x: Point| Vec2::new((3.0 * x.x).sin() * x.y, (2.0 * x.y).cos() + x.x * x.x);
        let quad = Quadrature::default();
        let (qa, qb) = (interpolate_rt(&a, &quad.edge, field), interpolate_rt(&b, &quad.edge, field));
        let (ga, gb) = (apply_gh(&a, &qa), apply_gh(&b, &qb));
        let by_midpoint: HashMap<_, _> = (0..b.num_edges())
            .map(|e| { let m = b.edge_midpoint(e); (key(m.x, m.y), gb.field.values[e]) })
            .collect();
        for e in 0..a.num_edges() {
            let m = a.edge_midpoint(e);
            let other = by_midpoint[&key(m.x, m.y)];
            prop_assert!((ga.field.values[e] - other).norm() <= 1e-12 * (1.0 + other.norm()));
        }
        let (ea, eb) = (estimator(&a, &qa, &quad).eta, estimator(&b, &qb, &quad).eta);
        prop_assert!((ea - eb).abs() <= 1e-12 * ea.max(1e-300));
    }
}

#[test]
fn linear_fields_are_exact_on_uniform_grids() {
    for n in [2, 5, 16] {
        let mesh = generate_uniform(n).unwrap();
        for seed in 0..8 {
            assert!(linear_defect(&mesh, seed) <= 1e-13, "n={n} seed={seed}");
        }
    }
}

#[test]
fn linear_defect_scales_like_h_to_alpha_on_perturbed_grids() {
    for alpha in [0.5, 1.0] {
        let ns = [16, 32, 64, 128];
        let hs: Vec<f64> = ns.iter().map(|&n| 1.0 / n as f64).collect();
        let defects: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let mesh = generate_perturbed(n, alpha, 1.0, 5).unwrap();
                (0..4).map(|s| linear_defect(&mesh, s)).fold(0.0, f64::max)
            })
            .collect();
        let slope = least_squares_slope(&hs, &defects).unwrap();
        assert!((slope - alpha).abs() <= 0.15, "alpha={alpha}: slope {slope}");
    }
}

#[test]
fn estimator_csv_has_one_row_per_triangle() {
    let mesh = generate_uniform(4).unwrap();
    let q = interpolate_rt(&mesh, &EdgeRule::default(), |x: Point| Vec2::new(x.y * x.y, x.x));
    let report = estimator(&mesh, &q, &Quadrature::default());
    let csv = report.to_csv();
    assert_eq!(csv.lines().next(), Some("triangle,eta"));
    assert_eq!(csv.lines().count(), mesh.num_triangles() + 1);
    let total: f64 = report.per_triangle.iter().map(|e| e * e).sum::<f64>().sqrt();
    assert!((total - report.eta).abs() <= 1e-14 * report.eta);
}
