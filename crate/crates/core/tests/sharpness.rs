mod common;

use common::*;
use dirreg_core::determine::greedy_select;
use dirreg_core::multiindex::enumerate_degree_k;
use dirreg_core::rank1::is_rank1_determining;
use dirreg_core::reconstruct::{directional_derivative, FunctionOracle};
use dirreg_core::sharpness::{
    build_theorem1_counterexample, build_theorem2_counterexample, default_radii, log_log, quotient_sweep,
    ridge_base_points, verify_blowup, verify_blowup_with, verify_directional_tameness, verify_theorem2_counterexample,
    HomogeneousMap, Profile, RIDGE_STEP,
};
use dirreg_core::{BigRational, DirectionSet, Error, Execution, Scalar};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

/// A certificate from a random degenerate Λ, with Λ itself.
fn certified(r: &mut rand_chacha::ChaCha8Rng, n: usize, m: usize, k: u32) -> (HomogeneousMap<BigRational>, DirectionSet<BigRational>) {
    loop {
        let len = r.gen_range(1..=system_dim(n, m, k) + 2);
        let lambda = random_lambda(r, n, m, k, len, true);
        if let Some(c) = greedy_select(&lambda).unwrap().certificate() {
            return (HomogeneousMap::from_form(&c.form), lambda);
        }
    }
}

#[test]
fn envelope_along_second_axis() {
    let phi = HomogeneousMap::new(enumerate_degree_k(2, 1).unwrap(), 1, vec![1.0, 0.0]).unwrap();
    let f = build_theorem1_counterexample(&phi);
    assert_eq!(f.evaluate(&[1e-3, 0.0]).unwrap(), vec![0.0]);
    let v = f.evaluate(&[0.0, 1e-3]).unwrap()[0];
    assert!((v - 1e-3 * 1000f64.ln().ln()).abs() < 1e-15);
    assert!((v - 1.9326e-3).abs() < 1e-7);
    assert!(f.evaluate(&[0.3, 0.3]).is_err());

    let radii: Vec<f64> = (4..=12).map(|e| 10f64.powi(-e)).collect();
    let report = verify_blowup(&phi, &radii).unwrap();
    assert!(report.passed());
    assert!(report.rows.windows(2).all(|w| w[1].value > w[0].value));
    assert!((report.rows.last().unwrap().ratio - 1.0).abs() < 0.05);
    for row in &report.rows {
        assert!((row.envelope - log_log(row.radius)).abs() < 1e-12);
    }
}

#[test]
fn certificates_yield_counterexamples() {
    let mut r = rng(51);
    for (n, m, k) in [(2, 1, 1), (2, 2, 1), (3, 1, 2), (2, 1, 2), (2, 2, 2), (2, 1, 3), (3, 2, 1), (1, 2, 2)] {
        let (phi, lambda) = certified(&mut r, n, m, k);
        let tame = verify_directional_tameness(&phi, &lambda, &default_radii()).unwrap();
        assert!(tame.passed(), "{n}{m}{k}: {tame:?}");
        assert_eq!(tame.rows.len(), lambda.len() * k as usize);
        let blow = verify_blowup(&phi, &default_radii()).unwrap();
        assert!(blow.passed(), "{n}{m}{k}: {blow:?}");
    }
}

#[test]
fn tameness_rejects_foreign_pairs() {
    let mut r = rng(52);
    let (phi, _) = certified(&mut r, 2, 1, 2);
    let form = phi.to_form();
    let pairs: Vec<_> = (0..20)
        .map(|_| (rational_vec(&mut r, 2), rational_vec(&mut r, 1)))
        .filter(|(xi, eta)| !form.evaluate(xi, eta).is_zero())
        .take(1)
        .collect();
    let lambda = DirectionSet::new(2, 1, 2, pairs).unwrap();
    let err = verify_directional_tameness(&phi, &lambda, &default_radii()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err:?}");
}

#[test]
fn sequential_and_parallel_sweeps_agree() {
    let mut r = rng(53);
    let (phi, _) = certified(&mut r, 3, 2, 2);
    let a = verify_blowup_with(&phi, &default_radii(), Execution::Sequential).unwrap();
    let b = verify_blowup_with(&phi, &default_radii(), Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rank1_witness_drives_ridge_map() {
    let mut r = rng(54);
    let mut checked = 0;
    while checked < 10 {
        let (n, m) = (r.gen_range(2..=3), r.gen_range(1..=3));
        let len = r.gen_range(1..=5);
        let lambda = random_lambda(&mut r, n, m, 1, len, true);
        let verdict = is_rank1_determining(&lambda).unwrap();
        let Some((u, v)) = verdict.witness() else { continue };
        let report = verify_theorem2_counterexample(u, v, Profile::weierstrass_default(), &lambda).unwrap();
        assert!(report.directional_vanishing(), "{report:?}");
        assert!(report.non_convergent() && report.spread_ratio > 2.0);
        checked += 1;
    }
}

#[test]
fn ridge_map_pairs_vanish_exactly() {
    let u = [q(0), q(1)];
    let v = [q(1), q(-1)];
    let f = build_theorem2_counterexample(&u, &v, Profile::weierstrass_default()).unwrap();
    for z in ridge_base_points(2) {
        // ⟨u,ξ⟩ = 0: constant along the line
        let a = directional_derivative(&f, &z, &[1.0, 0.0], &[0.3, 0.7], 1, &RIDGE_STEP).unwrap();
        assert_eq!(a, 0.0);
        // ⟨v,η⟩ = 0: the component itself is zero
        let b = directional_derivative(&f, &z, &[0.4, 1.0], &[1.0, 1.0], 1, &RIDGE_STEP).unwrap();
        assert_eq!(b, 0.0);
    }
}

#[test]
fn ridge_inputs_validated() {
    assert!(build_theorem2_counterexample(&[0.0, 0.0], &[1.0], Profile::Abs).is_err());
    assert!(build_theorem2_counterexample(&[1.0], &[0.0], Profile::Abs).is_err());
    assert!(build_theorem2_counterexample(&[1.0], &[1.0], Profile::Weierstrass { a: 0.5, b: 1.5 }).is_err());
    let lambda = DirectionSet::new(2, 1, 1, vec![(vec![1.0, 1.0], vec![1.0])]).unwrap();
    let err = verify_theorem2_counterexample(&[1.0, 0.0], &[1.0], Profile::Abs, &lambda).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn weierstrass_quotients_spread() {
    let q = quotient_sweep(&Profile::weierstrass_default(), 0.0);
    assert_eq!(q.len(), 12);
    let mags: Vec<f64> = q.iter().map(|r| r.quotient.abs()).collect();
    let max = mags.iter().cloned().fold(0.0, f64::max);
    let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min > 2.0);
    // a smooth profile settles
    let smooth = Profile::Custom { name: "sin".into(), f: std::sync::Arc::new(f64::sin) };
    let s = quotient_sweep(&smooth, 0.0);
    assert!(s.iter().all(|r| (r.quotient - 1.0).abs() < 1e-2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn annihilated_directions_have_vanishing_top_derivative(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=2, k in 1u32..=3) {
        let mut r = rng(seed);
        let (phi, lambda) = certified(&mut r, n, m, k);
        let map = phi.to_polynomial_map();
        for p in lambda.pairs() {
            let x = rational_vec(&mut r, n);
            // D_ξ^k⟨φ·, η⟩ is constant and equals k!⟨φ·(ξ), η⟩
            prop_assert!(iterated_directional(&map, &x, &p.xi, &p.eta, k).is_zero());
            let lead: BigRational = map
                .components()
                .iter()
                .zip(&p.eta)
                .map(|(c, e)| c.line_coefficient(&x, &p.xi, k).unwrap() * e)
                .fold(BigRational::zero(), |a, b| a + b);
            prop_assert!(lead.is_zero());
        }
        let xi = rational_vec(&mut r, n);
        let eta = rational_vec(&mut r, m);
        let x = rational_vec(&mut r, n);
        let k_fact = (1..=k as i64).product::<i64>();
        let direct = iterated_directional(&map, &x, &xi, &eta, k);
        prop_assert_eq!(direct, BigRational::integer(k_fact) * phi.to_form().evaluate(&xi, &eta));
    }
}
