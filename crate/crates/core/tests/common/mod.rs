//! Generators and brute-force oracles shared by the integration tests.
//!
//! Nothing here calls into the library's linear algebra: ranks,
//! determinants, multinomials and derivatives are recomputed from their
//! definitions.

#![allow(dead_code)]

use std::collections::BTreeMap;

use dirreg_core::poly::{Polynomial, PolynomialMap};
use dirreg_core::{BigRational, DirectionSet, Scalar};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(v: i64) -> BigRational {
    BigRational::integer(v)
}

/// Integer in `[-3, 3]`, or a small fraction a quarter of the time.
pub fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.gen_range(-3i64..=3);
    if rng.gen_bool(0.25) {
        BigRational::fraction(num, rng.gen_range(2i64..=4))
    } else {
        q(num)
    }
}

pub fn rational_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<BigRational> {
    (0..len).map(|_| small_rational(rng)).collect()
}

/// Random Λ; with `degenerate`, every ξ is forced into the hyperplane
/// `ξ₁ = ξ₂` (or onto 0 when `n = 1`), which can make it non-determining.
pub fn random_lambda(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    k: u32,
    len: usize,
    degenerate: bool,
) -> DirectionSet<BigRational> {
    let pairs = (0..len)
        .map(|_| {
            let mut xi = rational_vec(rng, n);
            if degenerate {
                if n == 1 {
                    xi[0] = q(0);
                } else {
                    xi[1] = xi[0].clone();
                }
            }
            (xi, rational_vec(rng, m))
        })
        .collect();
    DirectionSet::new(n, m, k, pairs).unwrap()
}

/// Numerator in `[-9, 9]` over a denominator in `1..=5`; wide enough that
/// random directions rarely coincide projectively.
pub fn wide_rational(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::fraction(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=5))
}

/// Random determining Λ with up to four spare pairs, by rejection.
pub fn determining_lambda(rng: &mut ChaCha8Rng, n: usize, m: usize, k: u32) -> DirectionSet<BigRational> {
    let dim = system_dim(n, m, k);
    loop {
        let len = dim + rng.gen_range(0..=4);
        let pairs = (0..len)
            .map(|_| ((0..n).map(|_| wide_rational(rng)).collect(), (0..m).map(|_| wide_rational(rng)).collect()))
            .collect();
        let lambda = DirectionSet::new(n, m, k, pairs).unwrap();
        if oracle_determining(&lambda) {
            return lambda;
        }
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `m·kₙ`
pub fn system_dim(n: usize, m: usize, k: u32) -> usize {
    m * binomial(k as u64 + n as u64 - 1, k as u64) as usize
}

/// Every vector in `[0, k]ⁿ` summing to `k`, sorted.
pub fn brute_indices(n: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let total = (k as usize + 1).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let mut e = vec![0u32; n];
        for slot in e.iter_mut().rev() {
            *slot = (c % (k as usize + 1)) as u32;
            c /= k as usize + 1;
        }
        if e.iter().sum::<u32>() == k {
            out.push(e);
        }
    }
    out.sort();
    out
}

/// Number of words of length `k` with letter counts `alpha`.
pub fn brute_multinomial(alpha: &[u32]) -> u128 {
    let n = alpha.len();
    let k: u32 = alpha.iter().sum();
    let mut count = 0u128;
    let total = n.pow(k);
    for code in 0..total {
        let mut c = code;
        let mut seen = vec![0u32; n];
        for _ in 0..k {
            seen[c % n] += 1;
            c /= n;
        }
        if seen == alpha {
            count += 1;
        }
    }
    count
}

fn factorial(k: u32) -> u128 {
    (1..=k as u128).product()
}

fn power(x: &BigRational, e: u32) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Monomial rows `ξ^α η_j` in `(α, j)` order, with `α` from
/// [`brute_indices`].
pub fn evaluation_rows(lambda: &DirectionSet<BigRational>) -> Vec<Vec<BigRational>> {
    let idx = brute_indices(lambda.n(), lambda.k());
    lambda
        .pairs()
        .iter()
        .map(|p| {
            let mut row = Vec::new();
            for a in &idx {
                let mon = p.xi.iter().zip(a).fold(BigRational::one(), |acc, (x, &e)| acc * power(x, e));
                for e in &p.eta {
                    row.push(mon.clone() * e);
                }
            }
            row
        })
        .collect()
}

/// Plain Gaussian elimination over the rationals.
pub fn gauss_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c].clone() / &pivot[c];
                for (x, y) in rows[r].iter_mut().zip(&pivot) {
                    *x -= f.clone() * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determining at order k iff the evaluation rows reach full column rank.
pub fn oracle_determining(lambda: &DirectionSet<BigRational>) -> bool {
    let dim = system_dim(lambda.n(), lambda.m(), lambda.k());
    lambda.len() >= dim && gauss_rank(evaluation_rows(lambda)) == dim
}

/// Laplace expansion along the first row.
pub fn laplace_det(a: &[Vec<BigRational>]) -> BigRational {
    let n = a.len();
    if n == 0 {
        return BigRational::one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut total = BigRational::zero();
    for c in 0..n {
        if a[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigRational>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = a[0][c].clone() * laplace_det(&minor);
        if c % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

/// Fraction-free rank of a small integer matrix.
pub fn bareiss_rank(mut a: Vec<Vec<i128>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                a[r][j] = (a[rank][c] * a[r][j] - a[r][c] * a[rank][j]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn to_int_rows(rows: &[&Vec<BigRational>]) -> Vec<Vec<i128>> {
    // clear denominators row by row
    rows.iter()
        .map(|r| {
            let lcm = r.iter().fold(num_bigint::BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
            r.iter()
                .map(|v| {
                    let scaled = v.clone() * BigRational::from_integer(lcm.clone());
                    i128::try_from(scaled.to_integer()).expect("small entries")
                })
                .collect()
        })
        .collect()
}

/// Rank-1 determining iff no split `S ∪ T` has `rank ξ_S < n` and
/// `rank η_T < m`, over all `2^{|Λ|}` splits.
pub fn exhaustive_rank1(lambda: &DirectionSet<BigRational>) -> bool {
    let len = lambda.len();
    let (n, m) = (lambda.n(), lambda.m());
    for mask in 0u64..(1 << len) {
        let s: Vec<&Vec<BigRational>> = (0..len).filter(|i| mask >> i & 1 == 1).map(|i| &lambda.pair(i).xi).collect();
        let t: Vec<&Vec<BigRational>> = (0..len).filter(|i| mask >> i & 1 == 0).map(|i| &lambda.pair(i).eta).collect();
        let rs = if s.is_empty() { 0 } else { bareiss_rank(to_int_rows(&s)) };
        let rt = if t.is_empty() { 0 } else { bareiss_rank(to_int_rows(&t)) };
        if rs < n && rt < m {
            return false;
        }
    }
    true
}

/// Random polynomial map whose components have total degree `≤ k`, with at
/// least one monomial of degree exactly `k`.
pub fn random_poly_map(rng: &mut ChaCha8Rng, n: usize, m: usize, k: u32) -> PolynomialMap {
    let comps = (0..m)
        .map(|j| {
            let mut terms: Vec<(Vec<u32>, BigRational)> = Vec::new();
            for _ in 0..rng.gen_range(1..=5) {
                let deg = rng.gen_range(0..=k);
                let e = random_exponents(rng, n, deg);
                terms.push((e, small_rational(rng)));
            }
            if j == 0 {
                let e = random_exponents(rng, n, k);
                terms.push((e, q(rng.gen_range(1..=3))));
            }
            let p = Polynomial::from_terms(n, terms).unwrap();
            if j == 0 && p.degree() != Some(k) {
                // cancellation removed the top term; add a fresh one
                let mut t: Vec<_> = p.terms().iter().map(|(e, c)| (e.clone(), c.clone())).collect();
                let mut e = vec![0; n];
                e[0] = k;
                t.push((e, q(1)));
                return Polynomial::from_terms(n, t).unwrap();
            }
            p
        })
        .collect();
    PolynomialMap::new(comps).unwrap()
}

fn random_exponents(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> Vec<u32> {
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[rng.gen_range(0..n)] += 1;
    }
    e
}

/// `ξ·∇p` as a polynomial.
pub fn directional_once(p: &Polynomial, xi: &[BigRational]) -> Polynomial {
    let mut terms: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for (e, c) in p.terms() {
        for i in 0..e.len() {
            if e[i] == 0 || xi[i].is_zero() {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            *terms.entry(d).or_insert_with(BigRational::zero) += c.clone() * q(e[i] as i64) * &xi[i];
        }
    }
    Polynomial::from_terms(p.n(), terms).unwrap()
}

/// `D_ξ^k⟨f, η⟩(x)` by applying `ξ·∇` k times.
pub fn iterated_directional(
    f: &PolynomialMap,
    x: &[BigRational],
    xi: &[BigRational],
    eta: &[BigRational],
    k: u32,
) -> BigRational {
    f.components()
        .iter()
        .zip(eta)
        .map(|(c, e)| {
            let d = (0..k).fold(c.clone(), |acc, _| directional_once(&acc, xi));
            d.evaluate(x).unwrap() * e
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `∂^α p` by repeated single-variable differentiation.
pub fn iterated_partial(p: &Polynomial, alpha: &[u32]) -> Polynomial {
    let mut out = p.clone();
    for (i, &a) in alpha.iter().enumerate() {
        let mut unit = vec![q(0); p.n()];
        unit[i] = q(1);
        for _ in 0..a {
            out = directional_once(&out, &unit);
        }
    }
    out
}

pub fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

pub fn max_abs(v: &[BigRational]) -> BigRational {
    v.iter().map(|c| c.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

pub fn to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// `k!/α!` from the definition.
pub fn multinomial_weight(alpha: &[u32]) -> u128 {
    factorial(alpha.iter().sum()) / alpha.iter().map(|&a| factorial(a)).product::<u128>()
}
