use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use etcsim_bench::{cascade, dense};
use etcsim_core::cert::m_min;
use etcsim_core::linalg::{matexp, zoh_step};
use etcsim_core::sim::simulate;
use etcsim_core::{EtmSpec, EtmVariant};

fn bench_matexp(c: &mut Criterion) {
    let mut g = c.benchmark_group("matexp");
    for n in [8, 22, 42] {
        let a = dense(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| b.iter(|| matexp(black_box(a)).unwrap()));
    }
    g.finish();
}

fn bench_zoh(c: &mut Criterion) {
    let mut g = c.benchmark_group("zoh_step");
    for n in [10, 20, 40] {
        let (sys, _) = cascade(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &sys, |b, sys| {
            b.iter(|| zoh_step(sys.a(), sys.b(), black_box(0.37)).unwrap())
        });
    }
    g.finish();
}

fn bench_simulate(c: &mut Criterion) {
    let (sys, x0) = cascade(20);
    let spec = EtmSpec::capped(EtmVariant::SampleRelativeCapped, 0.3, 1.0);
    c.bench_function("simulate_cascade_20", |b| {
        b.iter(|| simulate(&sys, &spec, black_box(&x0), 8.0, 1e-2, None).unwrap())
    });
}

fn bench_m_min(c: &mut Criterion) {
    let mut g = c.benchmark_group("m_min");
    g.sample_size(10);
    for n in [5, 20] {
        let (sys, _) = cascade(n);
        let a_cl = sys.closed_loop();
        g.bench_with_input(BenchmarkId::from_parameter(n), &a_cl, |b, a| {
            b.iter(|| m_min(a, sys.gram(), 0.5, 40.0, 1e-2).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_matexp, bench_zoh, bench_simulate, bench_m_min);
criterion_main!(benches);
