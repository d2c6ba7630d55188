use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dicke::basis::ModelParams;
use dicke::exec::Execution;
use dicke::integrator::IntegratorSettings;
use dicke::pipeline::{sweep_gammas, Capture};

fn sweep(c: &mut Criterion) {
    let model = ModelParams::resonant(8, 24);
    let gammas = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0];
    let settings = IntegratorSettings {
        sample_count: 100,
        ..IntegratorSettings::default()
    };
    let capture = Capture::default();
    let mut group = c.benchmark_group("velocity_sweep");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(sweep_gammas(&model, &gammas, &settings, &capture, Execution::Sequential)))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(sweep_gammas(&model, &gammas, &settings, &capture, Execution::Parallel)))
    });
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
