//! Run with: cargo bench -p diffloc-bench

use std::f64::consts::PI;

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use diffloc::localize::{localize, word_product};
use diffloc::sample::{random_diffeo, random_moebius};
use diffloc::words::WordBuilder;
use diffloc::{Config, Covering, PartitionOfUnity};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn circle(c: &mut Criterion) {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let f = random_diffeo(&mut rng, 16, 5.0, 0.5, &cfg).unwrap();
    let g = random_diffeo(&mut rng, 16, 5.0, 0.5, &cfg).unwrap();

    let mut group = c.benchmark_group("circle");
    group.bench_function("compose", |b| {
        b.iter(|| black_box(&f).compose(black_box(&g), &cfg).unwrap())
    });
    group.bench_function("invert", |b| b.iter(|| black_box(&f).invert(&cfg).unwrap()));
    group.bench_function("evaluate_1024", |b| {
        b.iter(|| (0..1024).map(|i| f.evaluate(i as f64 * 0.006)).sum::<f64>())
    });
    group.finish();
}

fn localization(c: &mut Criterion) {
    let cfg = Config {
        modes: 256,
        ..Config::default()
    };
    let p = PartitionOfUnity::build(&Covering::uniform(3, PI, 0.0).unwrap(), 0.05).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let phi = random_diffeo(&mut rng, 16, 5.0, 0.4 * p.epsilon_max(1.0), &cfg).unwrap();
    let word = localize(&phi, &p, &cfg).unwrap();

    let mut group = c.benchmark_group("localization");
    group.bench_function("localize", |b| {
        b.iter(|| localize(black_box(&phi), &p, &cfg).unwrap())
    });
    group.bench_function("word_product", |b| {
        b.iter(|| word_product(black_box(&word), &cfg).unwrap())
    });
    group.finish();
}

fn moebius(c: &mut Criterion) {
    let cfg = Config::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = random_moebius(&mut rng, 2.0, 1.0);
    let p = PartitionOfUnity::build(&Covering::uniform(3, 1.6 * PI, 0.0).unwrap(), 0.1).unwrap();
    let builder = WordBuilder::new(&p, &cfg).unwrap();

    let mut group = c.benchmark_group("moebius");
    group.sample_size(10);
    group.bench_function("to_diffeo", |b| {
        b.iter(|| black_box(&g).to_diffeo(&cfg).unwrap())
    });
    group.bench_function("iwasawa", |b| b.iter(|| black_box(&g).iwasawa()));
    group.bench_function("word", |b| b.iter(|| builder.word(black_box(&g)).unwrap()));
    group.finish();
}

criterion_group!(benches, circle, localization, moebius);
criterion_main!(benches);
