//! Multi-indices of fixed total degree and the monomial arithmetic built on
//! them.
//!
//! Indices are ordered lexicographically: `α ≺ β` when the first coordinate
//! where they differ is smaller in `α`. Every basis is listed in ascending
//! order, and that order fixes the row layout of all matrices and coefficient
//! vectors in the crate.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{check_dim, domain, Error, Result};
use crate::scalar::{pow, Scalar};

/// Exponent vector `(α₁, …, αₙ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(domain("multi-index needs at least one coordinate"));
        }
        Ok(MultiIndex { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// `α! = α₁!·…·αₙ!`
    pub fn factorial(&self) -> Result<u128> {
        self.exponents.iter().try_fold(1u128, |acc, &a| {
            factorial(a).and_then(|f| acc.checked_mul(f).ok_or(Error::Overflow("α!")))
        })
    }

    /// The index with `shift` added to the first exponent.
    pub fn shifted_first(&self, shift: u32) -> MultiIndex {
        let mut e = self.exponents.clone();
        e[0] += shift;
        MultiIndex { exponents: e }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exponents.cmp(&other.exponents)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exponents.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

/// All multi-indices of degree `k` in `n` variables, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexBasis {
    n: usize,
    k: u32,
    indices: Vec<MultiIndex>,
}

impl IndexBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// `kₙ = C(k+n−1, k)`
    pub fn count(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.indices.binary_search(alpha).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }
}

pub fn enumerate_degree_k(n: usize, k: u32) -> Result<IndexBasis> {
    if n == 0 {
        return Err(domain("dimension n must be at least 1"));
    }
    if k == 0 {
        return Err(domain("order k must be at least 1"));
    }
    let mut indices = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut current, 0, k, &mut indices);
    Ok(IndexBasis { n, k, indices })
}

// leading coordinate ascending, so output is lexicographically sorted
fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex {
            exponents: current.clone(),
        });
        return;
    }
    for a in 0..=remaining {
        current[pos] = a;
        fill(current, pos + 1, remaining - a, out);
    }
}

/// `C(k+n−1, k)` without enumerating.
pub fn count_degree_k(n: usize, k: u32) -> Result<u128> {
    binomial(k as u128 + n as u128 - 1, k as u128)
}

pub fn factorial(k: u32) -> Result<u128> {
    (1..=k as u128).try_fold(1u128, |acc, i| acc.checked_mul(i).ok_or(Error::Overflow("k!")))
}

fn binomial(n: u128, k: u128) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n−i) is divisible by (i+1) at every step
        acc = acc
            .checked_mul(n - i)
            .ok_or(Error::Overflow("binomial"))?
            / (i + 1);
    }
    Ok(acc)
}

/// `k!/(α₁!·…·αₙ!)`, computed as a product of binomials.
pub fn multinomial_coefficient(k: u32, alpha: &MultiIndex) -> Result<u128> {
    if alpha.degree() != k {
        return Err(domain(format!(
            "multi-index {alpha} has degree {} but order is {k}",
            alpha.degree()
        )));
    }
    let mut total: u128 = 0;
    let mut acc: u128 = 1;
    for &a in alpha.exponents() {
        total += a as u128;
        acc = acc
            .checked_mul(binomial(total, a as u128)?)
            .ok_or(Error::Overflow("multinomial"))?;
    }
    Ok(acc)
}

/// `ξ^α = Π ξᵢ^{αᵢ}` with `0⁰ = 1`.
pub fn monomial_eval<S: Scalar>(xi: &[S], alpha: &MultiIndex) -> Result<S> {
    check_dim(alpha.dim(), xi.len())?;
    Ok(xi
        .iter()
        .zip(alpha.exponents())
        .fold(S::one(), |acc, (x, &a)| acc * pow(x, a)))
}

/// Monomial evaluation for every element of `basis`, with powers shared.
pub fn monomials<S: Scalar>(xi: &[S], basis: &IndexBasis) -> Result<Vec<S>> {
    check_dim(basis.n(), xi.len())?;
    let k = basis.k() as usize;
    let powers: Vec<Vec<S>> = xi
        .iter()
        .map(|x| {
            let mut p = Vec::with_capacity(k + 1);
            p.push(S::one());
            for e in 1..=k {
                let next = p[e - 1].clone() * x.clone();
                p.push(next);
            }
            p
        })
        .collect();
    Ok(basis
        .iter()
        .map(|alpha| {
            alpha
                .exponents()
                .iter()
                .enumerate()
                .fold(S::one(), |acc, (i, &a)| acc * powers[i][a as usize].clone())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let b = enumerate_degree_k(2, 2).unwrap();
        assert_eq!(b.indices(), &[mi(&[0, 2]), mi(&[1, 1]), mi(&[2, 0])]);
        assert_eq!(b.count(), 3);
        assert_eq!(enumerate_degree_k(3, 2).unwrap().count(), 6);
        assert_eq!(enumerate_degree_k(1, 5).unwrap().indices(), &[mi(&[5])]);
    }

    #[test]
    fn enumerate_rejects_zero() {
        assert!(matches!(enumerate_degree_k(0, 2), Err(Error::Domain(_))));
        assert!(matches!(enumerate_degree_k(2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial_coefficient(2, &mi(&[1, 1])).unwrap(), 2);
        assert_eq!(multinomial_coefficient(3, &mi(&[3, 0])).unwrap(), 1);
        assert_eq!(multinomial_coefficient(4, &mi(&[2, 1, 1])).unwrap(), 12);
        assert!(matches!(
            multinomial_coefficient(3, &mi(&[1, 1])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn monomial_examples() {
        let q = |v: i64| BigRational::integer(v);
        assert_eq!(monomial_eval(&[q(2), q(3)], &mi(&[1, 2])).unwrap(), q(18));
        assert_eq!(monomial_eval(&[q(0), q(5)], &mi(&[0, 3])).unwrap(), q(125));
        assert_eq!(monomial_eval(&[q(0), q(5)], &mi(&[1, 0])).unwrap(), q(0));
        assert!(matches!(
            monomial_eval(&[q(1)], &mi(&[1, 0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn shared_powers_match_direct() {
        let b = enumerate_degree_k(3, 3).unwrap();
        let xi = [1.5, -2.0, 0.25];
        let all = monomials(&xi, &b).unwrap();
        for (alpha, v) in b.iter().zip(all) {
            assert_eq!(v, monomial_eval(&xi, alpha).unwrap());
        }
    }

    #[test]
    fn positions_follow_order() {
        let b = enumerate_degree_k(3, 2).unwrap();
        for (i, a) in b.iter().enumerate() {
            assert_eq!(b.position(a), Some(i));
        }
        assert_eq!(count_degree_k(3, 2).unwrap(), 6);
    }
}
