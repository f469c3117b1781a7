mod common;

use common::*;
use dirreg_core::rank1::{
    epsilon_constant, is_rank1_determining, minimal_determining_subset, objective, propagation_inequality_check,
    is_rank1_determining_with, validate_weight_sequence, witness_holds, Rank1Verdict, WeightSequence,
};
use dirreg_core::{BigRational, DirectionSet, Error, Execution, Scalar};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

fn coordinate_pairs(n: usize, m: usize) -> Vec<(Vec<BigRational>, Vec<BigRational>)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let mut xi = vec![q(0); n];
            xi[i] = q(1);
            let mut eta = vec![q(0); m];
            eta[j] = q(1);
            out.push((xi, eta));
        }
    }
    out
}

/// Entries in {−1, 0, 1, 2}: coincident hyperplanes are common, so both
/// verdicts occur.
fn coarse_lambda(r: &mut rand_chacha::ChaCha8Rng, n: usize, m: usize, len: usize) -> DirectionSet<BigRational> {
    let entry = |r: &mut rand_chacha::ChaCha8Rng| q([-1, 0, 0, 1, 1, 2][r.gen_range(0..6)]);
    let pairs = (0..len)
        .map(|_| ((0..n).map(|_| entry(r)).collect(), (0..m).map(|_| entry(r)).collect()))
        .collect();
    DirectionSet::new(n, m, 1, pairs).unwrap()
}

/// `min F` over a `res × res` grid of half circles; `F` is even in `u` and `v`.
fn dense_grid_min(lambda: &DirectionSet<f64>, l: u32, res: usize) -> f64 {
    let circle = |dim: usize| -> Vec<Vec<f64>> {
        if dim == 1 {
            return vec![vec![1.0]];
        }
        (0..res)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / res as f64;
                vec![t.cos(), t.sin()]
            })
            .collect()
    };
    let (us, vs) = (circle(lambda.n()), circle(lambda.m()));
    let mut best = f64::INFINITY;
    for u in &us {
        let w: Vec<f64> = lambda
            .pairs()
            .iter()
            .map(|p| p.xi.iter().zip(u).map(|(a, b)| a * b).sum::<f64>().abs().powi(l as i32))
            .collect();
        for v in &vs {
            let f: f64 = lambda
                .pairs()
                .iter()
                .zip(&w)
                .map(|(p, wi)| p.eta.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().abs() * wi)
                .sum();
            best = best.min(f);
        }
    }
    best
}

fn coordinate_set() -> DirectionSet<f64> {
    DirectionSet::new(2, 2, 1, coordinate_pairs(2, 2)).unwrap().to_f64()
}

#[test]
fn verdicts_match_partition_oracle() {
    let mut r = rng(61);
    let mut counts = (0, 0);
    for _ in 0..320 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let len = r.gen_range(1..=12);
        let lambda = coarse_lambda(&mut r, n, m, len);
        let verdict = is_rank1_determining(&lambda).unwrap();
        assert_eq!(verdict.is_determining(), exhaustive_rank1(&lambda), "{lambda:?}");
        if let Some((u, v)) = verdict.witness() {
            counts.1 += 1;
            assert!(u.iter().any(|c| !c.is_zero()) && v.iter().any(|c| !c.is_zero()));
            for p in lambda.pairs() {
                assert!(dot(u, &p.xi) * dot(v, &p.eta) == q(0));
            }
        } else {
            counts.0 += 1;
        }
    }
    assert!(counts.0 > 50 && counts.1 > 50, "{counts:?}");
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(q(0), |s, t| s + t)
}

#[test]
fn frozen_verdicts() {
    for (n, m) in [(1, 1), (2, 2), (3, 2), (2, 3), (3, 3)] {
        let lambda = DirectionSet::new(n, m, 1, coordinate_pairs(n, m)).unwrap();
        assert!(is_rank1_determining(&lambda).unwrap().is_determining());
    }
    let lambda = DirectionSet::new(
        2,
        2,
        1,
        vec![(vec![q(1), q(0)], vec![q(1), q(0)]), (vec![q(1), q(0)], vec![q(0), q(1)])],
    )
    .unwrap();
    assert_eq!(
        is_rank1_determining(&lambda).unwrap(),
        Rank1Verdict::NotDetermining1 { u: vec![q(0), q(1)], v: vec![q(1), q(0)] }
    );
    let empty = DirectionSet::<BigRational>::new(2, 2, 1, vec![]).unwrap();
    assert!(is_rank1_determining(&empty).is_err());
}

#[test]
fn sequential_and_parallel_verdicts_agree() {
    let mut r = rng(62);
    for _ in 0..60 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let len = r.gen_range(1..=10);
        let lambda = coarse_lambda(&mut r, n, m, len);
        assert_eq!(
            is_rank1_determining_with(&lambda, Execution::Sequential).unwrap(),
            is_rank1_determining_with(&lambda, Execution::Parallel).unwrap()
        );
    }
}

#[test]
fn minimal_subsets_survive_deletion_sweep() {
    let mut r = rng(63);
    let mut checked = 0;
    while checked < 40 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let len = r.gen_range(1..=12);
        let lambda = coarse_lambda(&mut r, n, m, len);
        if !exhaustive_rank1(&lambda) {
            assert!(matches!(minimal_determining_subset(&lambda), Err(Error::Precondition(_))));
            continue;
        }
        let min = minimal_determining_subset(&lambda).unwrap();
        assert!(exhaustive_rank1(&min.set));
        for drop in 0..min.ids.len() {
            let rest: Vec<usize> = (0..min.ids.len()).filter(|&i| i != drop).collect();
            if !rest.is_empty() {
                assert!(!exhaustive_rank1(&min.set.subset(&rest)));
            }
        }
        for (i, &id) in min.ids.iter().enumerate() {
            assert_eq!(min.set.pair(i).xi, lambda.pair(id).xi);
        }
        checked += 1;
    }
}

#[test]
fn duplicates_are_pruned() {
    let mut pairs = coordinate_pairs(2, 2);
    let base = pairs.len();
    for i in 0..5 {
        let p = pairs[i % base].clone();
        pairs.push(p);
    }
    let lambda = DirectionSet::new(2, 2, 1, pairs).unwrap();
    let min = minimal_determining_subset(&lambda).unwrap();
    assert_eq!(min.set.len(), base);
    let exact = DirectionSet::new(2, 2, 1, coordinate_pairs(2, 2)).unwrap();
    assert_eq!(minimal_determining_subset(&exact).unwrap().ids, vec![0, 1, 2, 3]);
}

#[test]
fn coordinate_epsilon_against_dense_grid() {
    let lambda = coordinate_set();
    let est = epsilon_constant(&lambda, 1, 32).unwrap();
    let oracle = dense_grid_min(&lambda, 1, 2000);
    assert!((oracle - 1.0).abs() < 1e-12);
    assert!((0.98..=1.02).contains(&(est.epsilon / oracle)), "{est:?}");
    assert!((objective(&lambda, 1, &est.u, &est.v) - est.epsilon).abs() < 1e-12);
}

#[test]
fn epsilon_within_two_percent_of_dense_grid() {
    let mut r = rng(64);
    let mut checked = 0;
    while checked < 16 {
        let (n, m) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let l = r.gen_range(0..=3u32);
        let len = r.gen_range(2..=6);
        let lambda = random_lambda(&mut r, n, m, 1, len, false);
        if !exhaustive_rank1(&lambda) {
            continue;
        }
        let lam = lambda.to_f64();
        let est = epsilon_constant(&lam, l, 24).unwrap();
        let oracle = dense_grid_min(&lam, l, 1500);
        assert!(est.epsilon <= oracle * (1.0 + 1e-9), "{} > {oracle}", est.epsilon);
        assert!(est.epsilon >= 0.98 * oracle, "{} vs {oracle} (l={l})", est.epsilon);
        assert!((objective(&lam, l, &est.u, &est.v) - est.epsilon).abs() <= 1e-12 * est.epsilon.max(1.0));
        checked += 1;
    }
}

#[test]
fn epsilon_positive_iff_determining() {
    let mut r = rng(65);
    let mut counts = (0, 0);
    for _ in 0..80 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let len = r.gen_range(1..=8);
        let lambda = coarse_lambda(&mut r, n, m, len);
        match epsilon_constant(&lambda, 1, 8) {
            Ok(est) => {
                assert!(exhaustive_rank1(&lambda));
                assert!(est.epsilon > 0.0);
                counts.0 += 1;
            }
            Err(Error::Witness { u, v }) => {
                assert!(!exhaustive_rank1(&lambda));
                assert!(objective(&lambda.to_f64(), 1, &u, &v).abs() < 1e-12);
                counts.1 += 1;
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(counts.0 > 10 && counts.1 > 10, "{counts:?}");
    assert!(epsilon_constant(&coordinate_set(), 1, 7).is_err());
}

#[test]
fn epsilon_scales_as_power_of_xi() {
    let mut r = rng(66);
    let mut checked = 0;
    while checked < 8 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(1..=2));
        let l = r.gen_range(1..=3u32);
        let len = r.gen_range(n * m..=n * m + 3);
        let lambda = random_lambda(&mut r, n, m, 1, len, false);
        if !exhaustive_rank1(&lambda) {
            continue;
        }
        let lam = lambda.to_f64();
        let doubled = DirectionSet::new(
            n,
            m,
            1,
            lam.pairs().iter().map(|p| (p.xi.iter().map(|c| 2.0 * c).collect(), p.eta.clone())).collect(),
        )
        .unwrap();
        let a = epsilon_constant(&lam, l, 16).unwrap().epsilon;
        let b = epsilon_constant(&doubled, l, 16).unwrap().epsilon;
        let want = a * 2f64.powi(l as i32);
        assert!((b - want).abs() <= 1e-9 * want, "{b} vs {want}");
        checked += 1;
    }
}

#[test]
fn propagation_on_random_unit_samples() {
    let mut r = rng(67);
    let mut checked = 0;
    while checked < 10 {
        let (n, m) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let len = r.gen_range(n * m..=n * m + 3);
        let lambda = random_lambda(&mut r, n, m, 1, len, false);
        if !exhaustive_rank1(&lambda) {
            continue;
        }
        let lam = lambda.to_f64();
        let l = r.gen_range(0..=2u32);
        let est = epsilon_constant(&lam, l, 16).unwrap();
        let samples: Vec<(Vec<f64>, Vec<f64>)> =
            (0..10_000).map(|_| (unit_vector(&mut r, n), unit_vector(&mut r, m))).collect();
        let report = propagation_inequality_check(&lam, &est, &samples).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.min_ratio >= 1.0 - 1e-9);
        let at_min = propagation_inequality_check(&lam, &est, &[(est.u.clone(), est.v.clone())]).unwrap();
        assert!(at_min.passed() && (at_min.min_ratio - 1.0).abs() <= est.gap + 1e-9);
        let zero = propagation_inequality_check(&lam, &est, &[(vec![0.0; n], unit_vector(&mut r, m))]).unwrap();
        assert!(zero.passed());
        checked += 1;
    }
}

#[test]
fn propagation_detects_inflated_epsilon() {
    let lambda = coordinate_set();
    let mut est = epsilon_constant(&lambda, 1, 16).unwrap();
    est.epsilon *= 1.5;
    let report = propagation_inequality_check(&lambda, &est, &[(vec![1.0, 0.0], vec![1.0, 0.0])]).unwrap();
    assert_eq!(report.violations, 1);
}

#[test]
fn weight_sequences() {
    for nu in [1.0, 1.5, 2.0, 3.0] {
        let report = validate_weight_sequence(&WeightSequence::gevrey(nu, 50)).unwrap();
        assert!(report.passed(), "{report:?}");
        // (M_{k+1}/M_k)^{1/k} = (k+1)^{ν/k} peaks at k = 1
        let c = report.smallest_c.unwrap();
        assert!(c.is_finite() && (c - 2f64.powf(nu)).abs() < 1e-9, "{nu}: {c}");
    }
    let ones = validate_weight_sequence(&WeightSequence::custom(vec![1.0; 10])).unwrap();
    assert_eq!(ones.lower_bound.first_failure, Some(2));
    let fact = validate_weight_sequence(&WeightSequence::factorial(20)).unwrap();
    assert!(fact.passed() && fact.factorial_equality && fact.note.is_some());
}

#[test]
fn weight_conditions_against_direct_products() {
    let mut r = rng(68);
    for _ in 0..200 {
        let len = r.gen_range(3..=12);
        let mut m = vec![1.0f64];
        for k in 1..len {
            let prev: f64 = m[k - 1];
            m.push(prev * r.gen_range(0.5..(2.0 * k as f64 + 2.0)));
        }
        let report = validate_weight_sequence(&WeightSequence::custom(m.clone())).unwrap();
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        let lower = (1..len).find(|&k| m[k] < fact(k) * (1.0 - 1e-12));
        assert_eq!(report.lower_bound.first_failure, lower);
        let inc = (1..len - 1).find(|&k| m[k + 1].powf(1.0 / (k + 1) as f64) <= m[k].powf(1.0 / k as f64) * (1.0 + 1e-11));
        if let Some(k) = report.increasing.first_failure {
            assert_eq!(Some(k - 1), inc);
        } else {
            assert_eq!(inc, None);
        }
        let c = (1..len - 1).map(|k| (m[k + 1] / m[k]).powf(1.0 / k as f64)).fold(0.0, f64::max);
        assert!((report.smallest_c.unwrap() - c).abs() <= 1e-9 * c.max(1.0));
        assert_eq!(report.difference.passed, m[1] <= m[0] * (1.0 + 1e-12));
    }
}

proptest! {
    #[test]
    fn objective_is_homogeneous(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3, l in 0u32..=3) {
        let mut r = rng(seed);
        let len = r.gen_range(1..=8);
        let lambda = random_lambda(&mut r, n, m, 1, len, false);
        let (u, v) = (rational_vec(&mut r, n), rational_vec(&mut r, m));
        let (s, t) = (small_rational(&mut r), small_rational(&mut r));
        let su: Vec<BigRational> = u.iter().map(|c| c * &s).collect();
        let tv: Vec<BigRational> = v.iter().map(|c| c * &t).collect();
        let lhs = objective(&lambda, l, &su, &tv);
        let scale = (0..l).fold(BigRational::integer(1), |acc, _| acc * s.abs()) * t.abs();
        prop_assert_eq!(lhs, scale * objective(&lambda, l, &u, &v));
    }

    #[test]
    fn witnesses_vanish_on_lambda(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3) {
        let mut r = rng(seed);
        let len = r.gen_range(1..=12);
        let lambda = coarse_lambda(&mut r, n, m, len);
        if let Some((u, v)) = is_rank1_determining(&lambda).unwrap().witness() {
            prop_assert!(witness_holds(&lambda, u, v));
            prop_assert!(objective(&lambda, 1, u, v).is_zero());
        }
    }
}
