//! Recovering k-th partials from directional derivatives.
//!
//! Directional values `d_p = D_{ξ^(p)}^k⟨f, η^(p)⟩(x)` over a determining
//! selection satisfy `d = Δᵀ u`, where `u` holds every `∂^α f_j(x)`. The
//! values come either from an oracle's exact directional derivative or from a
//! central finite-difference stencil along `t ↦ ⟨f(x + tξ), η⟩`.

use num_rational::BigRational;
use num_traits::Zero;

use crate::determine::{DeterminingVerdict, Selection};
use crate::error::{check_dim, domain, Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, Matrix};
use crate::moment::{self, DirectionSet, MomentMatrix};
use crate::multiindex::{factorial, IndexBasis, MultiIndex};
use crate::scalar::{dot, pow, Scalar};

/// A map `f: ℝⁿ → ℝᵐ` that can be sampled pointwise.
pub trait FunctionOracle<S: Scalar>: Send + Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn evaluate(&self, x: &[S]) -> Result<Vec<S>>;

    /// `D_ξ^k⟨f, η⟩(x)` when the oracle knows it in closed form.
    fn exact_directional(&self, _x: &[S], _xi: &[S], _eta: &[S], _k: u32) -> Option<Result<S>> {
        None
    }

    /// Serial oracles are never queried concurrently.
    fn is_serial(&self) -> bool {
        false
    }
}

/// Oracle backed by a closure.
pub struct ClosureOracle<F> {
    n: usize,
    m: usize,
    f: F,
    serial: bool,
}

impl<F> ClosureOracle<F> {
    pub fn new(n: usize, m: usize, f: F) -> Self {
        ClosureOracle {
            n,
            m,
            f,
            serial: false,
        }
    }

    pub fn serial(mut self) -> Self {
        self.serial = true;
        self
    }
}

impl<S, F> FunctionOracle<S> for ClosureOracle<F>
where
    S: Scalar,
    F: Fn(&[S]) -> Result<Vec<S>> + Send + Sync,
{
    fn input_dim(&self) -> usize {
        self.n
    }

    fn output_dim(&self) -> usize {
        self.m
    }

    fn evaluate(&self, x: &[S]) -> Result<Vec<S>> {
        check_dim(self.n, x.len())?;
        let y = (self.f)(x)?;
        check_dim(self.m, y.len())?;
        Ok(y)
    }

    fn is_serial(&self) -> bool {
        self.serial
    }
}

/// Central stencil for the k-th derivative on offsets `−p..=p`,
/// `p = ⌊(k+1)/2⌋`, exact on polynomials of degree `2p` and hence
/// second-order accurate.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralStencil {
    k: u32,
    offsets: Vec<i64>,
    weights: Vec<BigRational>,
    weights_f64: Vec<f64>,
}

impl CentralStencil {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(domain("order k must be at least 1"));
        }
        let p = k.div_ceil(2) as i64;
        let offsets: Vec<i64> = (-p..=p).collect();
        let size = offsets.len();
        // Σ_i w_i·i^q = q!·δ_{qk}
        let vandermonde = Matrix::from_fn(size, size, |q, i| {
            pow(&BigRational::integer(offsets[i]), q as u32)
        });
        let mut rhs = vec![BigRational::zero(); size];
        rhs[k as usize] = BigRational::from_count(factorial(k)?);
        let weights = linalg::solve(&vandermonde, &rhs)?;
        let weights_f64 = weights.iter().map(Scalar::to_f64).collect();
        Ok(CentralStencil {
            k,
            offsets,
            weights,
            weights_f64,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Largest `|t|/h` touched.
    pub fn reach(&self) -> i64 {
        *self.offsets.last().expect("stencil is nonempty")
    }

    /// `h^{−k} Σ w_i g(i·h)` from samples aligned with [`offsets`](Self::offsets).
    pub fn apply<S: Scalar>(&self, samples: &[S], h: &S) -> S {
        let sum = self
            .weights
            .iter()
            .zip(samples)
            .filter(|(w, _)| !w.is_zero())
            .fold(S::zero(), |acc, (w, g)| acc + S::from_rational(w) * g.clone());
        sum / pow(h, self.k)
    }

    /// `Σ |w_i||g_i| / h^k`, the scale of the roundoff in [`apply`](Self::apply).
    fn magnitude(&self, samples: &[f64], h: f64) -> f64 {
        let sum: f64 = self
            .weights_f64
            .iter()
            .zip(samples)
            .map(|(w, g)| (w * g).abs())
            .sum();
        sum / h.powi(self.k as i32)
    }
}

/// `h = ε^{1/(k+2)} · max(1, ‖x‖)`
pub fn default_step(x: &[f64], k: u32) -> f64 {
    let scale = crate::scalar::norm2_f64(x).max(1.0);
    f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * scale
}

/// A directional value with an estimate of its absolute error.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalEstimate<S> {
    pub value: S,
    pub error: f64,
    pub exact: bool,
}

fn line_samples<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    xi: &[S],
    eta: &[S],
    offsets: &[i64],
    h: &S,
) -> Result<Vec<S>> {
    offsets
        .iter()
        .map(|&i| {
            let t = S::integer(i) * h.clone();
            let point: Vec<S> = x
                .iter()
                .zip(xi)
                .map(|(a, b)| a.clone() + t.clone() * b.clone())
                .collect();
            let y = oracle.evaluate(&point)?;
            check_dim(eta.len(), y.len())?;
            Ok(dot(&y, eta))
        })
        .collect()
}

fn check_inputs<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    xi: &[S],
    eta: &[S],
) -> Result<()> {
    check_dim(oracle.input_dim(), x.len())?;
    check_dim(oracle.input_dim(), xi.len())?;
    check_dim(oracle.output_dim(), eta.len())
}

/// `D_ξ^k⟨f, η⟩(x)`, exact when the oracle provides it, otherwise a central
/// difference with step `h`.
pub fn directional_derivative<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    xi: &[S],
    eta: &[S],
    k: u32,
    h: &S,
) -> Result<S> {
    check_inputs(oracle, x, xi, eta)?;
    if let Some(exact) = oracle.exact_directional(x, xi, eta, k) {
        return exact;
    }
    if *h <= S::zero() {
        return Err(domain("step h must be positive"));
    }
    let stencil = CentralStencil::new(k)?;
    let g = line_samples(oracle, x, xi, eta, stencil.offsets(), h)?;
    Ok(stencil.apply(&g, h))
}

/// Like [`directional_derivative`], plus an error estimate: Richardson
/// comparison against step `h/2` for truncation, and `ε·Σ|w||g|/h^k` for
/// roundoff in float mode.
pub fn directional_estimate<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    xi: &[S],
    eta: &[S],
    k: u32,
    h: &S,
) -> Result<DirectionalEstimate<S>> {
    check_inputs(oracle, x, xi, eta)?;
    if let Some(exact) = oracle.exact_directional(x, xi, eta, k) {
        let value = exact?;
        let error = if S::EXACT {
            0.0
        } else {
            f64::EPSILON * value.to_f64().abs()
        };
        return Ok(DirectionalEstimate {
            value,
            error,
            exact: true,
        });
    }
    if *h <= S::zero() {
        return Err(domain("step h must be positive"));
    }
    let stencil = CentralStencil::new(k)?;
    let g = line_samples(oracle, x, xi, eta, stencil.offsets(), h)?;
    let value = stencil.apply(&g, h);
    let half = h.clone() / S::integer(2);
    let g_half = line_samples(oracle, x, xi, eta, stencil.offsets(), &half)?;
    let refined = stencil.apply(&g_half, &half);
    let truncation = (value.to_f64() - refined.to_f64()).abs() * 4.0 / 3.0;
    let roundoff = if S::EXACT {
        0.0
    } else {
        let gf: Vec<f64> = g.iter().map(Scalar::to_f64).collect();
        f64::EPSILON * stencil.magnitude(&gf, h.to_f64())
    };
    Ok(DirectionalEstimate {
        value,
        error: truncation + roundoff,
        exact: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorBound {
    Exact,
    Bound(f64),
}

impl ErrorBound {
    pub fn value(&self) -> f64 {
        match self {
            ErrorBound::Exact => 0.0,
            ErrorBound::Bound(b) => *b,
        }
    }
}

/// Every `∂^α f_j(x)` with `|α| = k`, stored in `(α, j)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeTensor<S> {
    pub basis: IndexBasis,
    pub m: usize,
    pub point: Vec<S>,
    pub values: Vec<S>,
    pub error_bound: ErrorBound,
}

impl<S: Scalar> DerivativeTensor<S> {
    /// Zero tensor shaped after `basis`.
    pub fn zeros(basis: IndexBasis, m: usize, point: Vec<S>) -> Self {
        let values = vec![S::zero(); basis.count() * m];
        DerivativeTensor {
            basis,
            m,
            point,
            values,
            error_bound: ErrorBound::Exact,
        }
    }

    pub fn k(&self) -> u32 {
        self.basis.k()
    }

    /// `∂^α f_j`, `j` zero-based.
    pub fn get(&self, alpha: &MultiIndex, j: usize) -> Option<&S> {
        if j >= self.m {
            return None;
        }
        self.basis
            .position(alpha)
            .map(|pos| &self.values[pos * self.m + j])
    }

    pub fn entries(&self) -> impl Iterator<Item = (&MultiIndex, usize, &S)> {
        self.values
            .iter()
            .enumerate()
            .map(|(r, v)| (&self.basis.indices()[r / self.m], r % self.m, v))
    }

    pub fn max_abs(&self) -> S {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(S::zero(), |a, b| if b > a { b } else { a })
    }
}

fn require_selection<S: Scalar>(verdict: &DeterminingVerdict<S>) -> Result<&Selection<S>> {
    verdict.selection().ok_or_else(|| {
        Error::Precondition("reconstruction needs a determining selection".into())
    })
}

fn resolve_step<S: Scalar>(x: &[S], k: u32, h: Option<&S>) -> Result<S> {
    match h {
        Some(h) if *h <= S::zero() => Err(domain("step h must be positive")),
        Some(h) => Ok(h.clone()),
        None => {
            let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
            Ok(S::from_f64_lossy(default_step(&xf, k)))
        }
    }
}

pub fn reconstruct_partials<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    verdict: &DeterminingVerdict<S>,
    h: Option<&S>,
) -> Result<DerivativeTensor<S>> {
    reconstruct_partials_with(oracle, x, verdict, h, Execution::default())
}

pub fn reconstruct_partials_with<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    verdict: &DeterminingVerdict<S>,
    h: Option<&S>,
    exec: Execution,
) -> Result<DerivativeTensor<S>> {
    let sel = require_selection(verdict)?;
    let mm = &sel.matrix;
    let k = mm.k();
    let h = resolve_step(x, k, h)?;
    let points = mm.points();
    let estimates = exec
        .honoring(oracle.is_serial())
        .map(points.len(), |i| {
            directional_estimate(oracle, x, &points[i].xi, &points[i].eta, k, &h)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let d: Vec<S> = estimates.iter().map(|e| e.value.clone()).collect();
    let values = moment::solve(mm, &d)?;
    let worst = estimates.iter().map(|e| e.error).fold(0.0, f64::max);
    let error_bound = if S::EXACT && estimates.iter().all(|e| e.exact) {
        ErrorBound::Exact
    } else {
        ErrorBound::Bound(sel.stability_b.to_f64() * worst)
    };
    Ok(DerivativeTensor {
        basis: mm.basis().clone(),
        m: mm.m(),
        point: x.to_vec(),
        values,
        error_bound,
    })
}

/// Reconstruction from directional values already measured at the selected
/// points, `d[i]` belonging to `selection.ids[i]`.
pub fn reconstruct_from_values<S: Scalar>(
    selection: &Selection<S>,
    point: &[S],
    d: &[S],
) -> Result<DerivativeTensor<S>> {
    let mm = &selection.matrix;
    check_dim(mm.dim(), d.len())?;
    let values = moment::solve(mm, d)?;
    let error_bound = if S::EXACT {
        ErrorBound::Exact
    } else {
        let scale = d.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
        ErrorBound::Bound(selection.stability_b.to_f64() * f64::EPSILON * scale * mm.dim() as f64)
    };
    Ok(DerivativeTensor {
        basis: mm.basis().clone(),
        m: mm.m(),
        point: point.to_vec(),
        values,
        error_bound,
    })
}

/// `u_{(α,j)} = Σ_p (C_{(α,j),p} / det Δ) d_p` with `C` the cofactor of Δ
/// at row `(α,j)`, column `p`.
pub fn cramer_reconstruct<S: Scalar>(mm: &MomentMatrix<S>, d: &[S]) -> Result<Vec<S>> {
    let dim = mm.dim();
    check_dim(dim, d.len())?;
    let det = moment::determinant(mm);
    if det.is_zero() {
        return Err(Error::Singular {
            rank: linalg::rank(mm.entries(), linalg::DEFAULT_RANK_TOL),
            dim,
        });
    }
    let others = |skip: usize| -> Vec<usize> { (0..dim).filter(|&i| i != skip).collect() };
    (0..dim)
        .map(|r| {
            let rows = others(r);
            let mut acc = S::zero();
            for (p, dp) in d.iter().enumerate() {
                if dp.is_zero() {
                    continue;
                }
                let minor = if dim == 1 {
                    S::one()
                } else {
                    linalg::determinant(&mm.entries().select(&rows, &others(p))).value
                };
                let signed = if (r + p) % 2 == 0 { minor } else { -minor };
                acc = acc + signed * dp.clone();
            }
            Ok(acc / det.value.clone())
        })
        .collect()
}

/// Outcome of checking `max|∂^α f_j(x)| ≤ B · sup_Λ |D_ξ^k⟨f,η⟩(x)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<S> {
    pub lhs: S,
    pub rhs: S,
    pub stability_b: S,
    pub holds: bool,
}

pub const STABILITY_SLACK: f64 = 1e-6;

pub fn verify_stability<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    verdict: &DeterminingVerdict<S>,
    lambda: &DirectionSet<S>,
    h: Option<&S>,
) -> Result<StabilityReport<S>> {
    verify_stability_with(oracle, x, verdict, lambda, h, Execution::default())
}

pub fn verify_stability_with<S: Scalar, O: FunctionOracle<S> + ?Sized>(
    oracle: &O,
    x: &[S],
    verdict: &DeterminingVerdict<S>,
    lambda: &DirectionSet<S>,
    h: Option<&S>,
    exec: Execution,
) -> Result<StabilityReport<S>> {
    let sel = require_selection(verdict)?;
    let k = sel.matrix.k();
    if lambda.k() != k {
        return Err(Error::Precondition(format!(
            "selection has order {k} but Λ has order {}",
            lambda.k()
        )));
    }
    let tensor = reconstruct_partials_with(oracle, x, verdict, h, exec)?;
    let step = resolve_step(x, k, h)?;
    let pairs = lambda.pairs();
    let sup = exec
        .honoring(oracle.is_serial())
        .map(pairs.len(), |i| {
            directional_derivative(oracle, x, &pairs[i].xi, &pairs[i].eta, k, &step)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|v| v.abs())
        .fold(S::zero(), |a, b| if b > a { b } else { a });
    let lhs = tensor.max_abs();
    let rhs = sel.stability_b.clone() * sup;
    let slack = S::one() + S::from_f64_lossy(STABILITY_SLACK);
    let holds = lhs <= rhs.clone() * slack;
    Ok(StabilityReport {
        lhs,
        rhs,
        stability_b: sel.stability_b.clone(),
        holds,
    })
}

/// `max_p |(Δᵀu)_p − d_p| / max(1, max|d|)`
pub fn pushforward_residual<S: Scalar>(mm: &MomentMatrix<S>, u: &[S], d: &[S]) -> Result<f64> {
    check_dim(mm.dim(), u.len())?;
    check_dim(mm.dim(), d.len())?;
    let back = mm.entries().transpose().mul_vec(u);
    let scale = d.iter().map(|v| v.to_f64().abs()).fold(1.0, f64::max);
    let worst = back
        .iter()
        .zip(d)
        .map(|(a, b)| (a.clone() - b.clone()).to_f64().abs())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}
