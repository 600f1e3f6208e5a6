use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gave_bench::lattice_problem;
use gave_core::{factorize, solve, two_norm_estimate, Method, SolverConfig};

fn bench_factorize(c: &mut Criterion) {
    let mut group = c.benchmark_group("band_factorize");
    group.sample_size(10);
    for m in [40usize, 60] {
        let p = lattice_problem(m, -4.0);
        let shifted = p.a.shifted(5.9);
        group.bench_with_input(BenchmarkId::from_parameter(m * m), &shifted, |b, a| {
            b.iter(|| factorize(a, a.symmetric_hint()).unwrap())
        });
    }
    group.finish();
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_n3600");
    group.sample_size(10);
    let p = lattice_problem(60, -4.0);
    for (label, cfg) in [
        ("mn_4.3", SolverConfig::new(Method::Mn).with_omega(4.3)),
        ("nmn_5.9", SolverConfig::new(Method::Nmn).with_omega(5.9)),
    ] {
        group.bench_function(label, |b| {
            b.iter(|| {
                let r = solve(&p, &cfg).unwrap();
                assert!(r.converged);
                r.iterations
            })
        });
    }
    group.finish();
}

fn bench_two_norm(c: &mut Criterion) {
    let p = lattice_problem(40, -4.0);
    let mut group = c.benchmark_group("two_norm_n1600");
    group.sample_size(10);
    group.bench_function("power_iteration", |b| {
        b.iter(|| two_norm_estimate(&p.b).value)
    });
    group.finish();
}

criterion_group!(benches, bench_factorize, bench_solvers, bench_two_norm);
criterion_main!(benches);
