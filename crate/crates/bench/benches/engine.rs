use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use noisy_ea::engine::{self, step_in_place};
use noisy_ea::harness::uniform_sampling_baseline;
use noisy_ea::{AlgorithmConfig, BitString, NoiseModel, ProblemInstance, RandomSource, StoppingRule};
use noisy_ea_bench::leading_ones_100;

fn generations(c: &mut Criterion) {
    let mut group = c.benchmark_group("generation");
    group.throughput(Throughput::Elements(1));
    for lambda in [1usize, 8] {
        let (inst, cfg) = leading_ones_100(lambda, 1.0 / 64.0);
        let mut rng = RandomSource::new(1);
        let mut parent = BitString::random(100, &mut rng);
        group.bench_with_input(BenchmarkId::new("leadingones_100", lambda), &lambda, |b, _| {
            b.iter(|| black_box(step_in_place(&mut parent, &cfg, &inst, &mut rng)))
        });
    }
    let inst = ProblemInstance::hurdle(100, 14).unwrap();
    let cfg = AlgorithmConfig::rls(1, NoiseModel::one_bit(1.0 / 256.0).unwrap()).unwrap();
    let mut rng = RandomSource::new(2);
    let mut parent = BitString::random(100, &mut rng);
    group.bench_function("hurdle_100_rls", |b| {
        b.iter(|| black_box(step_in_place(&mut parent, &cfg, &inst, &mut rng)))
    });
    group.finish();
}

fn full_run(c: &mut Criterion) {
    let inst = ProblemInstance::leading_ones(100).unwrap();
    let cfg = AlgorithmConfig::ea(1, NoiseModel::NoNoise).unwrap();
    let stop = StoppingRule::new(100_000).unwrap();
    let mut seed = 0;
    c.bench_function("run/leadingones_100_noise_free", |b| {
        b.iter(|| {
            seed += 1;
            black_box(engine::run(&inst, &cfg, &stop, &mut RandomSource::new(seed)))
        })
    });
}

fn sampling(c: &mut Criterion) {
    let inst = ProblemInstance::leading_ones(100).unwrap();
    let mut rng = RandomSource::new(3);
    let mut group = c.benchmark_group("uniform_sampling");
    group.throughput(Throughput::Elements(10_000));
    group.bench_function("leadingones_100", |b| {
        b.iter(|| black_box(uniform_sampling_baseline(&inst, 10_000, &mut rng).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, generations, full_run, sampling);
criterion_main!(benches);
