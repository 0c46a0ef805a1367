use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rbc_bench::qd_dataset;
use rbc_core::classify::{nearest_centroid, to_arrays, train, MLPModel, TrainConfig};

fn step(c: &mut Criterion) {
    let data = qd_dataset(200, 6);
    let (x, y) = to_arrays(&data.samples[..32]).unwrap();
    let model = MLPModel::reference(6, 2, 1).unwrap();
    c.bench_function("loss_and_gradients_batch32", |b| {
        b.iter(|| model.loss_and_gradients(black_box(x.view()), &y).unwrap())
    });
    let (all, _) = to_arrays(&data.samples).unwrap();
    c.bench_function("predict_400", |b| b.iter(|| model.predict_batch(black_box(all.view())).unwrap()));
}

fn training(c: &mut Criterion) {
    let data = qd_dataset(500, 6);
    let cfg = TrainConfig {
        epochs: 5,
        ..TrainConfig::default()
    };
    let mut group = c.benchmark_group("train");
    group.sample_size(10);
    group.bench_function("1000_samples_5_epochs", |b| b.iter(|| train(&data.samples, 2, &cfg).unwrap()));
    group.bench_function("nearest_centroid_1000", |b| {
        b.iter(|| nearest_centroid(&data.samples, &data.samples, 2, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, step, training);
criterion_main!(benches);
