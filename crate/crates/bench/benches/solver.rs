use congestflow::*;
use congestflow_bench::{balanced_demand, grid, random_graph};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_softmax(c: &mut Criterion) {
    let mut group = c.benchmark_group("softmax");
    for d in [1_000usize, 100_000] {
        let x: Vec<f64> = (0..d).map(|i| ((i * 2654435761) % 1000) as f64 / 50.0 - 10.0).collect();
        group.bench_with_input(BenchmarkId::new("lmax", d), &x, |b, x| {
            b.iter(|| lmax(black_box(x)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("grad_lmax", d), &x, |b, x| {
            b.iter(|| grad_lmax(black_box(x)))
        });
    }
    group.finish();
}

fn bench_approximators(c: &mut Criterion) {
    let g = random_graph(1024, 0);
    let b = balanced_demand(1024, 1);

    let mut group = c.benchmark_group("approximator");
    group.bench_function("build_hierarchy_t2_n1024", |bench| {
        bench.iter(|| build_hierarchy(black_box(&g), 2, 0).unwrap())
    });
    let h = build_hierarchy(&g, 2, 0).unwrap();
    let tree = build_tree_approximator(&g);
    let p: Vec<f64> = (0..h.rows()).map(|i| (i % 17) as f64 / 17.0 - 0.5).collect();
    group.bench_function("hierarchy_apply_n1024", |bench| {
        bench.iter(|| h.apply(black_box(b.values())))
    });
    group.bench_function("hierarchy_adjoint_n1024", |bench| {
        bench.iter(|| h.apply_adjoint(black_box(&p)))
    });
    group.bench_function("tree_apply_n1024", |bench| {
        bench.iter(|| tree.apply(black_box(b.values())))
    });
    group.finish();
}

fn bench_solver(c: &mut Criterion) {
    let g = grid(8, 0);
    let n = g.vertex_count();
    let b = DemandVector::unit_pair(n, 0, n - 1);
    let base = DegreeApproximator::new(&g, 1.0);
    let alpha = measure_alpha(&base, &g, 8, 0) * 1.25;
    let r = DegreeApproximator::new(&g, alpha);

    let mut group = c.benchmark_group("solver");
    group.sample_size(10);
    for eps in [0.5, 0.2] {
        group.bench_with_input(BenchmarkId::new("route_grid8", eps), &eps, |bench, &eps| {
            let cfg = SolverConfig::with_epsilon(eps);
            bench.iter(|| route(black_box(&g), &r, black_box(&b), eps, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_softmax, bench_approximators, bench_solver);
criterion_main!(benches);
