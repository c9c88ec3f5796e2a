use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fracdiff_core::forward::{
    caputo_l1_weights, march, OrderSpectrum, Scenario, TimeGrid, TimeOperator,
};
use fracdiff_core::mittag_leffler::{ml_eval, MLParams};
use fracdiff_core::spectral::EigenSystem;

fn ml(c: &mut Criterion) {
    let mut g = c.benchmark_group("ml_eval");
    // one argument per evaluation branch
    for z in [-0.5, -8.0, -60.0] {
        let p = MLParams::new(0.6, 1.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(z), &z, |b, &z| {
            b.iter(|| ml_eval(p, black_box(z)).unwrap())
        });
    }
    g.finish();
}

fn l1(c: &mut Criterion) {
    let mut g = c.benchmark_group("l1_march");
    for k in [256usize, 1024] {
        let uniform = TimeGrid::uniform(1.0, k).unwrap();
        let graded = TimeGrid::graded(1.0, k, 2.5).unwrap();
        let wu = caputo_l1_weights(0.5, &uniform).unwrap();
        let wg = caputo_l1_weights(0.5, &graded).unwrap();
        g.bench_with_input(BenchmarkId::new("uniform", k), &wu, |b, w| {
            b.iter(|| march(w, black_box(9.87), 1.0, None).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("graded", k), &wg, |b, w| {
            b.iter(|| march(w, black_box(9.87), 1.0, None).unwrap())
        });
    }
    g.finish();
}

fn project(c: &mut Criterion) {
    let eig = EigenSystem::interval(1.0, 64).unwrap();
    c.bench_function("project_64_modes", |b| {
        b.iter(|| eig.project(|x| black_box(x) * (1.0 - x), 256))
    });
}

fn observe(c: &mut Criterion) {
    let eig = EigenSystem::interval(1.0, 8).unwrap();
    let a = eig.project(|x| x * (1.0 - x), 256);
    let sc = Scenario::interior(eig, a, TimeGrid::graded(1.0, 128, 2.5).unwrap(), 0.3).unwrap();
    let op = TimeOperator::MultiTerm(OrderSpectrum::new(vec![0.8, 0.4], vec![1.0, 0.5]).unwrap());
    c.bench_function("observe_two_term_k128", |b| {
        b.iter(|| sc.observe(black_box(&op)).unwrap())
    });
}

criterion_group!(benches, ml, l1, project, observe);
criterion_main!(benches);
