use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qmlfraud_core::ansatz::{AnsatzKind, AnsatzSpec};
use qmlfraud_core::featuremaps::{FeatureMapKind, FeatureMapSpec};
use qmlfraud_core::models::{Architecture, Model, ModelSpec};
use qmlfraud_core::optim::{cobyla_minimize, OptimizerConfig};

fn model(arch: Architecture, map: FeatureMapKind, ansatz: AnsatzKind) -> Model {
    let mut spec = ModelSpec::new(arch, FeatureMapSpec::new(map, 7), AnsatzSpec::new(ansatz, 7));
    spec.shots = 0;
    Model::new(spec).unwrap()
}

fn inputs(rows: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|i| (0..7).map(|j| ((i * 7 + j) as f64 * 0.618).fract()).collect()).collect()
}

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_7q");
    let x = &inputs(1)[0];
    for map in FeatureMapKind::ALL {
        let m = model(Architecture::Vqc, map, AnsatzKind::EfficientSu2);
        let theta = vec![0.3; m.n_theta()];
        group.bench_with_input(BenchmarkId::from_parameter(map.key()), &theta, |b, t| {
            b.iter(|| m.state(black_box(t), black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn forward(c: &mut Criterion) {
    let rows = inputs(788);
    let mut group = c.benchmark_group("predict_batch_788");
    group.sample_size(20);
    for arch in Architecture::ALL {
        let m = model(arch, FeatureMapKind::Zz, AnsatzKind::RealAmplitudes);
        let params = vec![0.1; m.num_params()];
        group.bench_function(arch.key(), |b| b.iter(|| m.predict_batch(black_box(&params), &rows, 0).unwrap()));
    }
    group.finish();
}

fn cobyla(c: &mut Criterion) {
    let cfg = OptimizerConfig::default();
    c.bench_function("cobyla_quadratic_8d", |b| {
        b.iter(|| {
            let mut f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * (v - 0.5).powi(2)).sum();
            cobyla_minimize(&mut f, black_box(&[0.0; 8]), &cfg).unwrap()
        })
    });
}

criterion_group!(benches, simulate, forward, cobyla);
criterion_main!(benches);
