use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nda_core::augment::{cutmix, flip_horizontal, roll, rotate, shear_x};
use nda_core::{
    augment_sample, integrate_frames, resize_spatial, AugmentParams, Event, EventStream, FrameTensor,
    LabeledSample, Policy, Polarity, Rect, RngKey, SliceMode,
};
use rand::Rng;

fn spikes(seed: u64, h: usize, w: usize) -> FrameTensor {
    let mut rng = RngKey::new(seed, 0, 0).rng();
    let data = (0..10 * 2 * h * w).map(|_| u16::from(rng.random_bool(0.1))).collect();
    FrameTensor::from_vec(10, h, w, data, true).unwrap()
}

fn stream(n: usize, size: u32) -> EventStream {
    let mut rng = RngKey::new(1, 0, 0).rng();
    let events = (0..n)
        .map(|_| {
            Event::new(
                rng.random_range(0..300_000),
                rng.random_range(0..size) as u16,
                rng.random_range(0..size) as u16,
                if rng.random_bool(0.5) { Polarity::On } else { Polarity::Off },
            )
        })
        .collect();
    EventStream::new(events, size, size).unwrap()
}

fn kernels(c: &mut Criterion) {
    let x = spikes(0, 48, 48);
    let mut g = c.benchmark_group("kernel_48x48");
    g.bench_function("flip", |b| b.iter(|| flip_horizontal(black_box(&x))));
    g.bench_function("roll", |b| b.iter(|| roll(black_box(&x), 5, -3, false)));
    g.bench_function("rotate", |b| b.iter(|| rotate(black_box(&x), 30.0)));
    g.bench_function("shear_x", |b| b.iter(|| shear_x(black_box(&x), 0.3)));
    let a = LabeledSample::one_hot(x.clone(), 0, 10).unwrap();
    let p = LabeledSample::one_hot(spikes(1, 48, 48), 3, 10).unwrap();
    g.bench_function("cutmix", |b| b.iter(|| cutmix(black_box(&a), &p, Rect::new(10, 10, 24, 24))));
    g.bench_function("apply_cutout", |b| {
        let params = AugmentParams::Cutout { side: 16, cx: 24, cy: 24 };
        b.iter(|| nda_core::apply(black_box(&x), &params))
    });
    g.finish();
}

fn policy(c: &mut Criterion) {
    let samples: Vec<_> = (0..64)
        .map(|i| LabeledSample::one_hot(spikes(i, 48, 48), i as usize % 10, 10).unwrap())
        .collect();
    let mut g = c.benchmark_group("augment_sample");
    for (m, n) in [(1u8, 2u8), (3, 3)] {
        let policy = Policy::new(m, n).unwrap();
        let mut index = 0u64;
        g.bench_function(format!("m{m}n{n}"), |b| {
            b.iter_batched(
                || {
                    index += 1;
                    index
                },
                |i| {
                    let k = i as usize % samples.len();
                    let partner = &samples[(k + 1) % samples.len()];
                    augment_sample(&samples[k], Some(partner), &policy, &mut policy.rng(i)).unwrap()
                },
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn integrate(c: &mut Criterion) {
    let s = stream(20_000, 128);
    let mut g = c.benchmark_group("integrate");
    g.bench_function("equal_duration_128", |b| {
        b.iter(|| integrate_frames(black_box(&s), 10, SliceMode::EqualDuration, false).unwrap())
    });
    g.bench_function("equal_count_128", |b| {
        b.iter(|| integrate_frames(black_box(&s), 10, SliceMode::EqualCount, true).unwrap())
    });
    let f = integrate_frames(&s, 10, SliceMode::EqualDuration, false).unwrap();
    g.bench_function("resize_128_to_48", |b| b.iter(|| resize_spatial(black_box(&f), 48, 48).unwrap()));
    g.finish();
}

criterion_group!(benches, kernels, policy, integrate);
criterion_main!(benches);
