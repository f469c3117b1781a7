//! Deciding whether Λ determines order-k regularity.
//!
//! Two independent routes produce a [`DeterminingVerdict`]:
//!
//! * [`is_determining`] tests the column rank of the evaluation matrix
//!   `E[p, (α,j)] = (ξ^(p))^α η_j^(p)` directly and reads a certificate off
//!   its null space.
//! * [`greedy_select`] runs the augmentation loop: keep `m·kₙ` working
//!   points, build the annihilating form from a bordered minor of their
//!   moment matrix, and swap in any pair of Λ where that form does not vanish.
//!   Each swap raises the rank, so the loop ends with either a nonsingular
//!   selection or a form vanishing on all of Λ.
//!
//! [`select_well_conditioned`] picks a selection by greedy volume
//! maximisation followed by single-swap refinement, which tends to give a
//! small stability constant.

use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, Matrix, DEFAULT_RANK_TOL};
use crate::moment::{
    evaluation_matrix, evaluation_row, moment_matrix_for, row_weights, DirectionSet, MomentMatrix,
};
use crate::multiindex::{enumerate_degree_k, IndexBasis, MultiIndex};
use crate::scalar::{norm2_f64, Scalar};

/// Relative residual below which a float form counts as vanishing.
pub const FLOAT_VANISH_TOL: f64 = 1e-8;

/// `Φ(ξ, η) = Σ_{j, |α|=k} φ_{αj} ξ^α η_j`, coefficients stored in `(α, j)`
/// row order.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilatorForm<S> {
    basis: IndexBasis,
    m: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> AnnihilatorForm<S> {
    /// Rejects the zero form.
    pub fn new(basis: IndexBasis, m: usize, coeffs: Vec<S>) -> Result<Self> {
        crate::error::check_dim(basis.count() * m, coeffs.len())?;
        if coeffs.iter().all(Zero::is_zero) {
            return Err(domain("annihilating form must have a nonzero coefficient"));
        }
        Ok(AnnihilatorForm { basis, m, coeffs })
    }

    pub fn basis(&self) -> &IndexBasis {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.basis.k()
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// `φ_{αj}` with `j` zero-based.
    pub fn coeff(&self, alpha: &MultiIndex, j: usize) -> Option<&S> {
        let pos = self.basis.position(alpha)?;
        self.coeffs.get(pos * self.m + j)
    }

    /// Nonzero terms as `(α, j, φ_{αj})`, `j` zero-based.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, usize, &S)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(r, c)| (&self.basis.indices()[r / self.m], r % self.m, c))
    }

    pub fn evaluate(&self, xi: &[S], eta: &[S]) -> S {
        let row = evaluation_row(&self.basis, self.m, xi, eta);
        crate::scalar::dot(&self.coeffs, &row)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        norm2_f64(&self.coeffs)
    }

    /// Largest scaled residual `|Φ(ξ,η)| / (‖φ‖ max(1,‖ξ‖)^k max(1,‖η‖))`
    /// over Λ.
    pub fn residual(&self, lambda: &DirectionSet<S>) -> f64 {
        let norm = self.coeff_norm();
        lambda
            .pairs()
            .iter()
            .map(|p| scaled_value(self, norm, &p.xi, &p.eta))
            .fold(0.0, f64::max)
    }

    /// Exact zero on every pair (rationals) or residual within
    /// [`FLOAT_VANISH_TOL`] (floats).
    pub fn vanishes_on(&self, lambda: &DirectionSet<S>) -> bool {
        if S::EXACT {
            lambda
                .pairs()
                .iter()
                .all(|p| self.evaluate(&p.xi, &p.eta).is_zero())
        } else {
            self.residual(lambda) <= FLOAT_VANISH_TOL
        }
    }

    /// Rational forms get a leading coefficient of 1; float forms unit norm
    /// with a positive leading coefficient.
    pub fn normalized(&self) -> Self {
        let coeffs = if S::EXACT {
            let lead = self
                .coeffs
                .iter()
                .find(|c| !c.is_zero())
                .expect("nonzero form")
                .clone();
            self.coeffs.iter().map(|c| c.clone() / lead.clone()).collect()
        } else {
            let norm = self.coeff_norm();
            let cutoff = 1e-12 * norm;
            let lead_negative = self
                .coeffs
                .iter()
                .find(|c| c.to_f64().abs() > cutoff)
                .is_some_and(|c| c.is_negative());
            let scale = S::from_f64_lossy(if lead_negative { -norm } else { norm });
            self.coeffs.iter().map(|c| c.clone() / scale.clone()).collect()
        };
        AnnihilatorForm {
            basis: self.basis.clone(),
            m: self.m,
            coeffs,
        }
    }
}

fn scaled_value<S: Scalar>(form: &AnnihilatorForm<S>, norm: f64, xi: &[S], eta: &[S]) -> f64 {
    let v = form.evaluate(xi, eta).to_f64().abs();
    let scale = norm * norm2_f64(xi).max(1.0).powi(form.k() as i32) * norm2_f64(eta).max(1.0);
    if scale == 0.0 {
        v
    } else {
        v / scale
    }
}

fn is_nonvanishing<S: Scalar>(form: &AnnihilatorForm<S>, norm: f64, xi: &[S], eta: &[S]) -> bool {
    if S::EXACT {
        !form.evaluate(xi, eta).is_zero()
    } else {
        scaled_value(form, norm, xi, eta) > FLOAT_VANISH_TOL
    }
}

/// A nonsingular selection of `m·kₙ` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection<S> {
    /// Pair ids in Λ, ascending.
    pub ids: Vec<usize>,
    pub matrix: MomentMatrix<S>,
    pub stability_b: S,
    /// Point exchanges performed while searching.
    pub swaps: usize,
}

/// A nonzero form vanishing on Λ.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<S> {
    pub form: AnnihilatorForm<S>,
    /// Scaled residual over Λ; exactly zero in rational mode.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeterminingVerdict<S> {
    Determining(Selection<S>),
    NotDetermining(Certificate<S>),
}

impl<S: Scalar> DeterminingVerdict<S> {
    pub fn is_determining(&self) -> bool {
        matches!(self, DeterminingVerdict::Determining(_))
    }

    pub fn selection(&self) -> Option<&Selection<S>> {
        match self {
            DeterminingVerdict::Determining(s) => Some(s),
            DeterminingVerdict::NotDetermining(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate<S>> {
        match self {
            DeterminingVerdict::Determining(_) => None,
            DeterminingVerdict::NotDetermining(c) => Some(c),
        }
    }
}

/// Tuning shared by the decision routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub exec: Execution,
    /// Relative singular-value cutoff for float rank decisions.
    pub rank_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            exec: Execution::default(),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

fn check_nonempty<S: Scalar>(lambda: &DirectionSet<S>) -> Result<()> {
    if lambda.is_empty() {
        Err(domain("direction set Λ is empty"))
    } else {
        Ok(())
    }
}

fn certificate<S: Scalar>(lambda: &DirectionSet<S>, form: AnnihilatorForm<S>) -> Certificate<S> {
    let form = form.normalized();
    let residual = if S::EXACT { 0.0 } else { form.residual(lambda) };
    Certificate { form, residual }
}

fn determining<S: Scalar>(
    lambda: &DirectionSet<S>,
    mut ids: Vec<usize>,
    swaps: usize,
) -> Result<DeterminingVerdict<S>> {
    ids.sort_unstable();
    let matrix = moment_matrix_for(lambda, &ids)?;
    let stability_b = stability_constant(&matrix)?;
    Ok(DeterminingVerdict::Determining(Selection {
        ids,
        matrix,
        stability_b,
        swaps,
    }))
}

pub fn is_determining<S: Scalar>(lambda: &DirectionSet<S>) -> Result<DeterminingVerdict<S>> {
    is_determining_with(lambda, &Options::default())
}

pub fn is_determining_with<S: Scalar>(
    lambda: &DirectionSet<S>,
    opts: &Options,
) -> Result<DeterminingVerdict<S>> {
    check_nonempty(lambda)?;
    let basis = lambda.basis();
    let dim = lambda.system_dim();
    let e = evaluation_matrix(lambda);
    let full_rank = lambda.len() >= dim && linalg::rank(&e, opts.rank_tol) == dim;
    if full_rank {
        let rows = linalg::independent_rows(&e, opts.rank_tol);
        if rows.len() == dim {
            return determining(lambda, rows, 0);
        }
        // elimination and SVD disagree at the tolerance edge
        let ids = volume_greedy(lambda, opts)?;
        return determining(lambda, ids, 0);
    }
    let coeffs = if S::EXACT {
        linalg::null_space(&e, opts.rank_tol)
            .into_iter()
            .next()
            .expect("rank deficiency leaves a null vector")
    } else {
        let (v, _) = linalg::smallest_singular_vector(&e.to_f64());
        v.into_iter().map(S::from_f64_lossy).collect()
    };
    let form = AnnihilatorForm::new(basis, lambda.m(), coeffs)?;
    Ok(DeterminingVerdict::NotDetermining(certificate(lambda, form)))
}

/// The weighted moment columns of the given pairs: `dim × ids.len()`.
fn weighted_columns<S: Scalar>(lambda: &DirectionSet<S>, ids: &[usize]) -> Matrix<S> {
    let basis = lambda.basis();
    let weights: Vec<S> = row_weights(&basis, lambda.m());
    let cols: Vec<Vec<S>> = ids
        .iter()
        .map(|&i| {
            let p = lambda.pair(i);
            evaluation_row(&basis, lambda.m(), &p.xi, &p.eta)
        })
        .collect();
    Matrix::from_fn(weights.len(), ids.len(), |r, c| {
        weights[r].clone() * cols[c][r].clone()
    })
}

/// Annihilating form from the rank-deficient working matrix `delta`
/// (rows `(α,j)`, one column per working point).
///
/// Picks the lowest-index nonsingular `l × l` core (columns `C`, rows `R`),
/// borders it with the first row `r₀ ∉ R`, replaces the extra column by the
/// variable column `(k!/α!) ξ^α η_j`, and expands the determinant along it.
/// `core_cols` must be the lowest-index maximal independent column set.
fn bordered_form<S: Scalar>(
    delta: &Matrix<S>,
    core_cols: &[usize],
    basis: &IndexBasis,
    m: usize,
    tol: f64,
) -> AnnihilatorForm<S> {
    let dim = delta.rows();
    let all_rows: Vec<usize> = (0..dim).collect();
    let l = core_cols.len();
    let core_rows = linalg::independent_rows(&delta.select(&all_rows, core_cols), tol);
    let r0 = (0..dim)
        .find(|r| !core_rows.contains(r))
        .expect("rank below dimension leaves a free row");
    let mut border_rows = core_rows.clone();
    border_rows.push(r0);
    border_rows.sort_unstable();
    let r0_pos = border_rows.iter().position(|&r| r == r0).expect("inserted");

    // Cofactors along the variable column are proportional to the left null
    // vector of the bordered (l+1)×l block; the r₀ cofactor is ±det of the core.
    let block = delta.select(&border_rows, core_cols);
    let mut cofactors: Vec<S> = if l == 0 {
        vec![S::one()]
    } else {
        let ns = linalg::null_space(&block.transpose(), tol);
        let v = ns.into_iter().next().expect("(l+1)×l block has a left null vector");
        let pivot = v[r0_pos].clone();
        v.into_iter().map(|x| x / pivot.clone()).collect()
    };
    let core = delta.select(&core_rows, core_cols);
    let core_det = linalg::determinant(&core).value;
    let sign = if (r0_pos + l) % 2 == 0 { S::one() } else { -S::one() };
    let scale = sign * core_det;
    for c in cofactors.iter_mut() {
        *c = c.clone() * scale.clone();
    }

    let weights: Vec<S> = row_weights(basis, m);
    let mut coeffs = vec![S::zero(); dim];
    for (pos, &r) in border_rows.iter().enumerate() {
        coeffs[r] = cofactors[pos].clone() * weights[r].clone();
    }
    AnnihilatorForm {
        basis: basis.clone(),
        m,
        coeffs,
    }
}

pub fn greedy_select<S: Scalar>(lambda: &DirectionSet<S>) -> Result<DeterminingVerdict<S>> {
    greedy_select_with(lambda, &Options::default())
}

pub fn greedy_select_with<S: Scalar>(
    lambda: &DirectionSet<S>,
    opts: &Options,
) -> Result<DeterminingVerdict<S>> {
    check_nonempty(lambda)?;
    let basis = lambda.basis();
    let dim = lambda.system_dim();
    let mut working: Vec<usize> = (0..lambda.len().min(dim)).collect();
    let mut swaps = 0;
    // the rank rises every round; the float path gets a hard cap
    for _ in 0..=dim + lambda.len() {
        let delta = weighted_columns(lambda, &working);
        let core_cols = linalg::independent_columns(&delta, opts.rank_tol);
        if core_cols.len() == dim {
            return determining(lambda, working, swaps);
        }
        let form = bordered_form(&delta, &core_cols, &basis, lambda.m(), opts.rank_tol);
        let norm = form.coeff_norm();
        let pairs = lambda.pairs();
        let hit = opts.exec.find_first(pairs.len(), |i| {
            !working.contains(&i) && is_nonvanishing(&form, norm, &pairs[i].xi, &pairs[i].eta)
        });
        let Some(q) = hit else {
            return Ok(DeterminingVerdict::NotDetermining(certificate(lambda, form)));
        };
        if working.len() < dim {
            working.push(q);
        } else {
            let p0 = (0..working.len())
                .find(|c| !core_cols.contains(c))
                .expect("rank deficiency leaves a free column");
            working[p0] = q;
        }
        swaps += 1;
    }
    is_determining_with(lambda, opts)
}

/// Greedy complete pivoting on the weighted columns of all of Λ: each step
/// takes the column with the largest residual entry, which maximises the
/// bordered minor given the previous picks. Ties go to the lowest id.
fn volume_greedy<S: Scalar>(lambda: &DirectionSet<S>, opts: &Options) -> Result<Vec<usize>> {
    let all: Vec<usize> = (0..lambda.len()).collect();
    let mut work = weighted_columns(lambda, &all);
    let dim = work.rows();
    let cols = work.cols();
    let threshold = if S::EXACT { 0.0 } else { opts.rank_tol * work.max_abs() };
    let mut row_used = vec![false; dim];
    let mut col_used = vec![false; cols];
    let mut picked = Vec::with_capacity(dim);
    for _ in 0..dim {
        let best_per_col: Vec<Option<(usize, S)>> = opts.exec.map(cols, |c| {
            if col_used[c] {
                return None;
            }
            let mut best: Option<(usize, S)> = None;
            for r in (0..dim).filter(|&r| !row_used[r]) {
                let v = work[(r, c)].abs();
                if best.as_ref().is_none_or(|(_, b)| v > *b) {
                    best = Some((r, v));
                }
            }
            best
        });
        let mut choice: Option<(usize, usize, S)> = None;
        for (c, cand) in best_per_col.into_iter().enumerate() {
            if let Some((r, v)) = cand {
                if choice.as_ref().is_none_or(|(_, _, b)| v > *b) {
                    choice = Some((c, r, v));
                }
            }
        }
        let Some((c, r, v)) = choice else { break };
        if v.is_negligible(threshold) {
            break;
        }
        row_used[r] = true;
        col_used[c] = true;
        picked.push(c);
        let pivot = work[(r, c)].clone();
        for i in (0..dim).filter(|&i| !row_used[i]) {
            if work[(i, c)].is_zero() {
                continue;
            }
            let factor = work[(i, c)].clone() / pivot.clone();
            for j in 0..cols {
                let val = work[(i, j)].clone() - factor.clone() * work[(r, j)].clone();
                work[(i, j)] = val;
            }
        }
    }
    if picked.len() < dim {
        return Err(Error::Singular {
            rank: picked.len(),
            dim,
        });
    }
    Ok(picked)
}

/// Single-swap exchange: replace selected column `i` by candidate `q`
/// whenever `|z_q[i]| > 1`, where `z_q = Δ_sel⁻¹ Δ[:, q]` is the factor the
/// swap multiplies `|det|` by.
fn refine_volume<S: Scalar>(
    lambda: &DirectionSet<S>,
    mut ids: Vec<usize>,
    opts: &Options,
) -> Result<(Vec<usize>, usize)> {
    let gain_floor = if S::EXACT { S::one() } else { S::from_f64_lossy(1.0 + 1e-9) };
    let all: Vec<usize> = (0..lambda.len()).collect();
    let full = weighted_columns(lambda, &all);
    let dim = full.rows();
    let mut swaps = 0;
    for _ in 0..100 * dim.max(1) {
        let sel = full.select(&(0..dim).collect::<Vec<_>>(), &ids);
        let factor = linalg::lu(&sel);
        let candidates: Vec<usize> = all.iter().copied().filter(|q| !ids.contains(q)).collect();
        let gains: Vec<Option<(usize, S)>> = opts.exec.map(candidates.len(), |t| {
            let z = factor.solve(&full.column(candidates[t]), 1e-14)?;
            let mut best: Option<(usize, S)> = None;
            for (i, zi) in z.into_iter().enumerate() {
                let a = zi.abs();
                if best.as_ref().is_none_or(|(_, b)| a > *b) {
                    best = Some((i, a));
                }
            }
            best
        });
        let mut choice: Option<(usize, usize, S)> = None;
        for (t, g) in gains.into_iter().enumerate() {
            if let Some((i, a)) = g {
                if a > gain_floor && choice.as_ref().is_none_or(|(_, _, b)| a > *b) {
                    choice = Some((t, i, a));
                }
            }
        }
        let Some((t, i, _)) = choice else { break };
        ids[i] = candidates[t];
        swaps += 1;
    }
    Ok((ids, swaps))
}

pub fn select_well_conditioned<S: Scalar>(
    lambda: &DirectionSet<S>,
) -> Result<DeterminingVerdict<S>> {
    select_well_conditioned_with(lambda, &Options::default())
}

pub fn select_well_conditioned_with<S: Scalar>(
    lambda: &DirectionSet<S>,
    opts: &Options,
) -> Result<DeterminingVerdict<S>> {
    let verdict = is_determining_with(lambda, opts)?;
    if !verdict.is_determining() {
        return Ok(verdict);
    }
    let ids = volume_greedy(lambda, opts)?;
    let (ids, swaps) = refine_volume(lambda, ids, opts)?;
    determining(lambda, ids, swaps)
}

/// `B = max_{(α,j)} Σ_p |(Δᵀ)⁻¹[(α,j), p]|`, the largest absolute row sum
/// of the map from directional values to partials. Equals the cofactor bound
/// `max Σ_p |det Δ_{αj}^{(p)} / det Δ|`.
pub fn stability_constant<S: Scalar>(mm: &MomentMatrix<S>) -> Result<S> {
    let inv = linalg::inverse(&mm.entries().transpose())?;
    Ok((0..inv.rows())
        .map(|r| {
            inv.row(r)
                .iter()
                .fold(S::zero(), |acc, v| acc + v.abs())
        })
        .fold(S::zero(), |acc, v| if v > acc { v } else { acc }))
}

/// Multiplies every monomial of `phi` by `ξ₁^{k_target − k}`.
pub fn annihilator_order_shift<S: Scalar>(
    phi: &AnnihilatorForm<S>,
    k_target: u32,
) -> Result<AnnihilatorForm<S>> {
    if k_target < phi.k() {
        return Err(domain(format!(
            "target order {k_target} is below the form's order {}",
            phi.k()
        )));
    }
    let shift = k_target - phi.k();
    let basis = enumerate_degree_k(phi.n(), k_target)?;
    let m = phi.m();
    let mut coeffs = vec![S::zero(); basis.count() * m];
    for (r, c) in phi.coeffs().iter().enumerate() {
        let alpha = phi.basis().indices()[r / m].shifted_first(shift);
        let pos = basis.position(&alpha).expect("shifted index keeps the degree");
        coeffs[pos * m + r % m] = c.clone();
    }
    AnnihilatorForm::new(basis, m, coeffs)
}
