use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use superconv::mesh::generate_uniform;
use superconv::solver::{assemble_mixed, solve_mixed};
use superconv::{apply_gh, estimator, ProblemSpec, Quadrature};

fn assembly_and_solve(c: &mut Criterion) {
    let quad = Quadrature::default();
    let problem = ProblemSpec::reaction_diffusion();
    let mut group = c.benchmark_group("mixed");
    group.sample_size(10);
    for n in [16, 32, 64] {
        let mesh = generate_uniform(n).unwrap();
        group.bench_with_input(BenchmarkId::new("assemble", n), &mesh, |b, mesh| {
            b.iter(|| assemble_mixed(black_box(mesh), &problem, &quad).unwrap())
        });
        let system = assemble_mixed(&mesh, &problem, &quad).unwrap();
        group.bench_with_input(BenchmarkId::new("solve", n), &system, |b, system| {
            b.iter(|| solve_mixed(black_box(system)).unwrap())
        });
    }
    group.finish();
}

fn recovery(c: &mut Criterion) {
    let quad = Quadrature::default();
    let problem = ProblemSpec::reaction_diffusion();
    let mut group = c.benchmark_group("recovery");
    for n in [32, 128] {
        let mesh = generate_uniform(n).unwrap();
        let p_h = solve_mixed(&assemble_mixed(&mesh, &problem, &quad).unwrap())
            .unwrap()
            .p_h;
        group.bench_with_input(BenchmarkId::new("apply_gh", n), &p_h, |b, p_h| {
            b.iter(|| apply_gh(&mesh, black_box(p_h)))
        });
        group.bench_with_input(BenchmarkId::new("estimator", n), &p_h, |b, p_h| {
            b.iter(|| estimator(&mesh, black_box(p_h), &quad))
        });
    }
    group.finish();
}

criterion_group!(benches, assembly_and_solve, recovery);
criterion_main!(benches);
