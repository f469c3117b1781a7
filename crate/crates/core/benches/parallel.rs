//! Sequential against parallel execution on the three data-parallel scans:
//! greedy augmentation, the ε grid, and directional sampling during
//! reconstruction.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dirreg_core::determine::{greedy_select_with, Options};
use dirreg_core::rank1::epsilon::epsilon_constant_with;
use dirreg_core::reconstruct::{reconstruct_partials_with, ClosureOracle};
use dirreg_core::{BigRational, DirectionSet, Execution, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn rational_set(n: usize, m: usize, k: u32, len: usize, seed: u64) -> DirectionSet<BigRational> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut v = |len: usize| -> Vec<BigRational> {
        (0..len).map(|_| BigRational::fraction(r.gen_range(-9..=9), r.gen_range(1..=5))).collect()
    };
    let pairs = (0..len).map(|_| (v(n), v(m))).collect();
    DirectionSet::new(n, m, k, pairs).unwrap()
}

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_select");
    group.sample_size(10);
    // a degenerate tail forces a long candidate scan on every rank step
    for (n, m, k) in [(2, 2, 3), (3, 3, 2), (3, 2, 3)] {
        let dim = (n..n + k as usize).product::<usize>() / (1..=k as usize).product::<usize>() * m;
        let lambda = rational_set(n, m, k, dim * 3, 7);
        for (name, exec) in MODES {
            let opts = Options { exec, ..Options::default() };
            group.bench_with_input(BenchmarkId::new(name, format!("n{n}m{m}k{k}")), &lambda, |b, l| {
                b.iter(|| greedy_select_with(l, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn epsilon(c: &mut Criterion) {
    let mut group = c.benchmark_group("epsilon_constant");
    group.sample_size(10);
    let lambda = rational_set(3, 3, 1, 12, 11).to_f64();
    for grid in [16, 48] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, grid), &grid, |b, &g| {
                b.iter(|| epsilon_constant_with(&lambda, 2, g, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn reconstruct(c: &mut Criterion) {
    let mut group = c.benchmark_group("reconstruct_partials");
    let lambda = rational_set(3, 3, 3, 30, 13).to_f64();
    let verdict = greedy_select_with(&lambda, &Options::default()).unwrap();
    // an oracle with some per-call cost, as a simulation would have
    let f = ClosureOracle::new(3, 3, |x: &[f64]| {
        let s: f64 = (0..200).map(|i| (x[0] + i as f64 * 1e-3).sin() * x[1].cos() + x[2]).sum();
        Ok(vec![s, s * x[0], s.exp().min(1e6)])
    });
    let x = [0.1, 0.2, -0.3];
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| reconstruct_partials_with(&f, &x, &verdict, None, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, greedy, epsilon, reconstruct);
criterion_main!(benches);
