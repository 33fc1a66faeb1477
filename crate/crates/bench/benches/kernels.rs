use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::Rng;

use ferro_core::code::exact_min_rank;
use ferro_core::construct::{construct_invariance, gabidulin, GabidulinSpec};
use ferro_core::genericity::{mrd_proportion_normalized, EstimateMode};
use ferro_core::gf::make_field;
use ferro_core::rng::TrialRng;
use ferro_core::{Elem, GfMatrix};

fn rank(c: &mut Criterion) {
    for (p, k, n) in [(2, 1, 32), (3, 1, 16), (2, 4, 16)] {
        let f = make_field(p, k).unwrap();
        let mut rng = TrialRng::new(1).stream(0);
        let data = (0..n * n).map(|_| Elem(rng.gen_range(0..f.order()))).collect();
        let a = GfMatrix::from_data(&f, n, n, data);
        c.bench_function(&format!("rank {n}x{n} over GF({})", f.order()), |b| b.iter(|| black_box(&a).rank()));
    }
}

fn distance(c: &mut Criterion) {
    let inv = construct_invariance(2, 6, 6, 4, 2).unwrap();
    c.bench_function("exact distance, dim 8 on 6x6 over GF(2)", |b| {
        b.iter(|| exact_min_rank(black_box(&inv), u64::MAX).unwrap())
    });
    let gab = gabidulin(&GabidulinSpec::new(2, 4, 4, 2).unwrap()).unwrap().code;
    c.bench_function("exact distance, Gabidulin 4x4 d=2 over GF(2)", |b| {
        b.iter(|| exact_min_rank(black_box(&gab), u64::MAX).unwrap())
    });
}

fn spectrum_free_trials(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectrum-free pair trials");
    g.sample_size(10);
    for q in [2u32, 3, 5] {
        g.bench_function(format!("10^4 trials, 4x4 over GF({q})"), |b| {
            b.iter(|| mrd_proportion_normalized(4, 3, 3, q, EstimateMode::Sampled { trials: 10_000, seed: 1 }).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, rank, distance, spectrum_free_trials);
criterion_main!(benches);
