//! Polynomial maps `ℝⁿ → ℝᵐ` with rational coefficients.
//!
//! These serve as exact oracles: directional derivatives come from expanding
//! `t ↦ p(x + tξ)` and reading off a Taylor coefficient, partials from
//! symbolic differentiation.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{check_dim, domain, Result};
use crate::multiindex::{factorial, IndexBasis, MultiIndex};
use crate::reconstruct::FunctionOracle;
use crate::scalar::{pow, Scalar};

/// Sparse polynomial in `n` variables, keyed by exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; n], BigRational::one());
        Polynomial { n, terms }
    }

    /// Sums duplicate exponents and drops zero coefficients.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        if n == 0 {
            return Err(domain("polynomial needs at least one variable"));
        }
        let mut out: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (e, c) in terms {
            check_dim(n, e.len())?;
            *out.entry(e).or_insert_with(BigRational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(Polynomial { n, terms: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self, k: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == k)
    }

    pub fn evaluate<S: Scalar>(&self, x: &[S]) -> Result<S> {
        check_dim(self.n, x.len())?;
        Ok(self.terms.iter().fold(S::zero(), |acc, (e, c)| {
            let mon = x
                .iter()
                .zip(e)
                .fold(S::from_rational(c), |m, (xi, &a)| m * pow(xi, a));
            acc + mon
        }))
    }

    /// `∂^α p`
    pub fn partial(&self, alpha: &MultiIndex) -> Result<Polynomial> {
        check_dim(self.n, alpha.dim())?;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.iter().zip(alpha.exponents()).any(|(a, d)| a < d) {
                continue;
            }
            let mut coeff = c.clone();
            let mut exps = e.clone();
            for (a, &d) in exps.iter_mut().zip(alpha.exponents()) {
                // falling factorial a·(a−1)·…·(a−d+1)
                for i in 0..d {
                    coeff *= BigRational::from_integer((*a - i).into());
                }
                *a -= d;
            }
            terms.insert(exps, coeff);
        }
        Ok(Polynomial { n: self.n, terms })
    }

    /// Coefficient of `t^p` in `p(x + tξ)`.
    pub fn line_coefficient<S: Scalar>(&self, x: &[S], xi: &[S], p: u32) -> Result<S> {
        check_dim(self.n, x.len())?;
        check_dim(self.n, xi.len())?;
        let p = p as usize;
        let mut total = S::zero();
        for (e, c) in &self.terms {
            let mut series = vec![S::zero(); p + 1];
            series[0] = S::from_rational(c);
            for ((xv, dv), &a) in x.iter().zip(xi).zip(e) {
                if a == 0 {
                    continue;
                }
                let factor = binomial_series(xv, dv, a, p);
                series = truncated_product(&series, &factor);
            }
            total = total + series[p].clone();
        }
        Ok(total)
    }

    /// `D_ξ^k p(x) = k! · [t^k] p(x + tξ)`
    pub fn directional<S: Scalar>(&self, x: &[S], xi: &[S], k: u32) -> Result<S> {
        let c = self.line_coefficient(x, xi, k)?;
        Ok(c * S::from_count(factorial(k)?))
    }
}

// (x + tξ)^a truncated at t^p
fn binomial_series<S: Scalar>(x: &S, xi: &S, a: u32, p: usize) -> Vec<S> {
    let top = (a as usize).min(p);
    let mut out = vec![S::zero(); p + 1];
    let mut binom: u128 = 1;
    for (r, slot) in out.iter_mut().enumerate().take(top + 1) {
        *slot = S::from_count(binom) * pow(x, a - r as u32) * pow(xi, r as u32);
        binom = binom * (a as u128 - r as u128) / (r as u128 + 1);
    }
    out
}

fn truncated_product<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let p = a.len() - 1;
    let mut out = vec![S::zero(); p + 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(p + 1 - i) {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// `f = (f₁, …, f_m)` with polynomial components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialMap {
    n: usize,
    components: Vec<Polynomial>,
}

impl PolynomialMap {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = match components.first() {
            Some(c) => c.n(),
            None => return Err(domain("polynomial map needs at least one component")),
        };
        for c in &components {
            check_dim(n, c.n())?;
        }
        Ok(PolynomialMap { n, components })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn degree(&self) -> Option<u32> {
        self.components.iter().filter_map(Polynomial::degree).max()
    }

    pub fn evaluate<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>> {
        self.components.iter().map(|c| c.evaluate(x)).collect()
    }

    /// All `∂^α f_j(x)` over `basis`, in `(α, j)` order.
    pub fn partials<S: Scalar>(&self, x: &[S], basis: &IndexBasis) -> Result<Vec<S>> {
        let mut out = Vec::with_capacity(basis.count() * self.m());
        for alpha in basis.iter() {
            for c in &self.components {
                out.push(c.partial(alpha)?.evaluate(x)?);
            }
        }
        Ok(out)
    }

    /// `D_ξ^k⟨f, η⟩(x)`
    pub fn directional<S: Scalar>(&self, x: &[S], xi: &[S], eta: &[S], k: u32) -> Result<S> {
        check_dim(self.m(), eta.len())?;
        let mut acc = S::zero();
        for (c, e) in self.components.iter().zip(eta) {
            if e.is_zero() {
                continue;
            }
            acc = acc + c.directional(x, xi, k)? * e.clone();
        }
        Ok(acc)
    }
}

impl<S: Scalar> FunctionOracle<S> for PolynomialMap {
    fn input_dim(&self) -> usize {
        self.n
    }

    fn output_dim(&self) -> usize {
        self.m()
    }

    fn evaluate(&self, x: &[S]) -> Result<Vec<S>> {
        PolynomialMap::evaluate(self, x)
    }

    fn exact_directional(&self, x: &[S], xi: &[S], eta: &[S], k: u32) -> Option<Result<S>> {
        Some(self.directional(x, xi, eta, k))
    }
}

/// A single monomial `c · x^e`, convenient for building maps by hand.
pub fn monomial(exponents: &[u32], coeff: BigRational) -> (Vec<u32>, BigRational) {
    (exponents.to_vec(), coeff)
}
