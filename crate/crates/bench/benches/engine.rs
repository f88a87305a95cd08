use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dynex_core::engine::{
    aq_set, delta_prime_exact, mc_block_maxima, mc_theta_runs, theta_exact, ConditionCheckConfig, RunsConfig,
};
use dynex_core::{rat, ClosedForm, DependenceFunctions, ExampleId, FrequencyVector, IntervalSet, MapSpec};

fn tau(a: i64, b: i64) -> FrequencyVector {
    FrequencyVector::new(vec![rat(a, 1), rat(b, 1)]).unwrap()
}

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    for id in [ExampleId::LinkedPeriodic, ExampleId::OverlapPeriodic] {
        let sys = id.system();
        g.bench_function(format!("theta_exact/{}", id.key()), |b| {
            b.iter(|| theta_exact(&sys, black_box(&tau(3, 1)), 1 << 18, 2).unwrap())
        });
    }
    let sys = ExampleId::OverlapNonPeriodic.system();
    g.bench_function("aq_set/q6", |b| {
        b.iter(|| aq_set(&sys, black_box(&tau(1, 1)), 1 << 22, 6).unwrap())
    });
    let cfg = ConditionCheckConfig::for_n(1 << 40);
    g.bench_function("delta_prime/n2^40", |b| {
        b.iter(|| delta_prime_exact(&sys, black_box(&tau(1, 1)), 1 << 40, 0, &cfg).unwrap())
    });
    g.finish();
}

fn pullback(c: &mut Criterion) {
    let mut g = c.benchmark_group("pullback");
    let s = IntervalSet::from_pieces(vec![(rat(1, 7), rat(2, 7)), (rat(1, 2), rat(13, 20))]);
    let small = IntervalSet::from_pieces(vec![(rat(1, 1000), rat(3, 1000))]);
    let map = MapSpec::tripling();
    g.bench_function("set/j8", |b| {
        b.iter(|| map.pullback_within(black_box(&small), &s, 8, u128::MAX).unwrap())
    });
    g.bench_function("measure/j8", |b| {
        b.iter(|| {
            map.pullback_measure_within(black_box(&small), &s, 8, u128::MAX)
                .unwrap()
        })
    });
    g.bench_function("measure/j40", |b| {
        b.iter(|| {
            map.pullback_measure_within(black_box(&small), &s, 40, u128::MAX)
                .unwrap()
        })
    });
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("mc");
    g.sample_size(10);
    let circle = ExampleId::LinkedPeriodic.system();
    g.bench_function("block_maxima/circle_1e6_steps", |b| {
        b.iter(|| mc_block_maxima(&circle, &tau(1, 1), 1000, 1000, black_box(1)).unwrap())
    });
    let cat = ExampleId::CatMap.system();
    g.bench_function("block_maxima/cat_1e6_steps", |b| {
        b.iter(|| mc_block_maxima(&cat, &tau(1, 1), 1000, 1000, black_box(1)).unwrap())
    });
    g.bench_function("runs/cat_1e6_steps", |b| {
        b.iter(|| mc_theta_runs(&cat, &tau(1, 1), 1000, 2, RunsConfig::new(1_000_000), black_box(1)).unwrap())
    });
    g.finish();
}

fn closed_form(c: &mut Criterion) {
    let cat = ClosedForm(ExampleId::CatMap);
    let tri = ClosedForm(ExampleId::Trivariate);
    c.bench_function("closed_form/cat_theta", |b| {
        b.iter(|| cat.theta(black_box(&[0.3, 0.7])))
    });
    c.bench_function("closed_form/trivariate_g", |b| {
        b.iter(|| tri.g(black_box(&[0.2, 0.3, 0.5])))
    });
}

criterion_group!(benches, exact, pullback, monte_carlo, closed_form);
criterion_main!(benches);
