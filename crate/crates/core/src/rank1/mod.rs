//! Rank-one determining sets.
//!
//! Λ is rank-1 determining when no product form `⟨u,ξ⟩⟨v,η⟩` with `u ≠ 0`,
//! `v ≠ 0` vanishes on all of Λ. Equivalently, Λ admits no split `S ∪ T`
//! with the `ξ` of `S` inside a hyperplane and the `η` of `T` inside a
//! hyperplane.

pub mod epsilon;
pub mod weights;

use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, Matrix, DEFAULT_RANK_TOL};
use crate::moment::DirectionSet;
use crate::scalar::{dot, norm2_f64, Scalar};

pub use epsilon::{epsilon_constant, objective, propagation_inequality_check, EpsilonEstimate, PropagationReport};
pub use weights::{validate_weight_sequence, WeightFamily, WeightReport, WeightSequence};

#[derive(Debug, Clone, PartialEq)]
pub enum Rank1Verdict<S> {
    Determining1,
    NotDetermining1 { u: Vec<S>, v: Vec<S> },
}

impl<S> Rank1Verdict<S> {
    pub fn is_determining(&self) -> bool {
        matches!(self, Rank1Verdict::Determining1)
    }

    pub fn witness(&self) -> Option<(&[S], &[S])> {
        match self {
            Rank1Verdict::Determining1 => None,
            Rank1Verdict::NotDetermining1 { u, v } => Some((u, v)),
        }
    }
}

/// Relative threshold for `⟨u, ξ⟩ = 0` in float mode.
pub const FLOAT_ORTHO_TOL: f64 = 1e-10;

pub(crate) fn is_orthogonal<S: Scalar>(a: &[S], b: &[S]) -> bool {
    let d = dot(a, b);
    if S::EXACT {
        d.is_zero()
    } else {
        d.to_f64().abs() <= FLOAT_ORTHO_TOL * norm2_f64(a) * norm2_f64(b)
    }
}

fn unit<S: Scalar>(dim: usize) -> Vec<S> {
    let mut e = vec![S::zero(); dim];
    e[0] = S::one();
    e
}

/// A nonzero vector orthogonal to every row, if one exists.
pub(crate) fn common_normal<S: Scalar>(rows: &[&[S]], dim: usize) -> Option<Vec<S>> {
    if rows.is_empty() {
        return Some(unit(dim));
    }
    let a = Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect());
    linalg::null_space(&a, DEFAULT_RANK_TOL).into_iter().next()
}

fn rank_of<S: Scalar>(rows: &[&[S]]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    linalg::rank(&Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()), DEFAULT_RANK_TOL)
}

/// Subsets of `0..len` of size `size`, lexicographic.
pub(crate) fn combinations(len: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    fn rec(start: usize, len: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..len {
            if len - i < size - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, len, size, current, out);
            current.pop();
        }
    }
    rec(0, len, size, &mut current, &mut out);
    out
}

/// Witness `v` for a given `u`: the pairs with `⟨u, ξ⟩ ≠ 0` must have their
/// `η` inside a common hyperplane.
fn complete_witness<S: Scalar>(lambda: &DirectionSet<S>, u: &[S]) -> Option<Vec<S>> {
    let t: Vec<&[S]> = lambda
        .pairs()
        .iter()
        .filter(|p| !is_orthogonal(u, &p.xi))
        .map(|p| p.eta.as_slice())
        .collect();
    if rank_of(&t) < lambda.m() {
        common_normal(&t, lambda.m())
    } else {
        None
    }
}

pub fn is_rank1_determining<S: Scalar>(lambda: &DirectionSet<S>) -> Result<Rank1Verdict<S>> {
    is_rank1_determining_with(lambda, Execution::default())
}

/// Candidate hyperplanes `u⊥` are spanned by `n−1` independent `ξ` of Λ; any
/// witness hyperplane can be enlarged to one of these unless all `ξ` lie in
/// a proper subspace, which is checked first.
pub fn is_rank1_determining_with<S: Scalar>(
    lambda: &DirectionSet<S>,
    exec: Execution,
) -> Result<Rank1Verdict<S>> {
    if lambda.is_empty() {
        return Err(domain("Λ must contain at least one pair"));
    }
    let n = lambda.n();
    let xis: Vec<&[S]> = lambda.pairs().iter().map(|p| p.xi.as_slice()).collect();
    if rank_of(&xis) < n {
        let u = common_normal(&xis, n).expect("rank-deficient rows have a normal");
        return Ok(Rank1Verdict::NotDetermining1 { u, v: unit(lambda.m()) });
    }
    let nonzero: Vec<usize> = (0..lambda.len())
        .filter(|&i| !lambda.pair(i).xi.iter().all(Zero::is_zero))
        .collect();
    let subsets = combinations(nonzero.len(), n - 1);
    let normal_of = |s: &[usize]| -> Option<Vec<S>> {
        let rows: Vec<&[S]> = s.iter().map(|&i| xis[nonzero[i]]).collect();
        if rank_of(&rows) == n - 1 {
            common_normal(&rows, n)
        } else {
            None
        }
    };
    let hit = exec.find_first(subsets.len(), |i| {
        normal_of(&subsets[i]).is_some_and(|u| complete_witness(lambda, &u).is_some())
    });
    Ok(match hit {
        Some(i) => {
            let u = normal_of(&subsets[i]).expect("checked");
            let v = complete_witness(lambda, &u).expect("checked");
            Rank1Verdict::NotDetermining1 { u, v }
        }
        None => Rank1Verdict::Determining1,
    })
}

/// `⟨u,ξ⟩⟨v,η⟩ = 0` on every pair, with `u ≠ 0` and `v ≠ 0`.
pub fn witness_holds<S: Scalar>(lambda: &DirectionSet<S>, u: &[S], v: &[S]) -> bool {
    if u.iter().all(Zero::is_zero) || v.iter().all(Zero::is_zero) {
        return false;
    }
    lambda
        .pairs()
        .iter()
        .all(|p| is_orthogonal(u, &p.xi) || is_orthogonal(v, &p.eta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalSubset<S> {
    /// Ids of the kept pairs in the input Λ.
    pub ids: Vec<usize>,
    /// The kept pairs, renumbered from zero.
    pub set: DirectionSet<S>,
}

/// Drops pairs lowest id first whenever the remainder stays rank-1
/// determining. One pass suffices: a pair kept at some stage stays necessary
/// in every later, smaller set.
pub fn minimal_determining_subset<S: Scalar>(lambda: &DirectionSet<S>) -> Result<MinimalSubset<S>> {
    minimal_determining_subset_with(lambda, Execution::default())
}

pub fn minimal_determining_subset_with<S: Scalar>(
    lambda: &DirectionSet<S>,
    exec: Execution,
) -> Result<MinimalSubset<S>> {
    if !is_rank1_determining_with(lambda, exec)?.is_determining() {
        return Err(Error::Precondition("Λ is not rank-1 determining".into()));
    }
    let mut kept: Vec<usize> = (0..lambda.len()).collect();
    for id in 0..lambda.len() {
        let trial: Vec<usize> = kept.iter().copied().filter(|&k| k != id).collect();
        if trial.is_empty() {
            continue;
        }
        if is_rank1_determining_with(&lambda.subset(&trial), exec)?.is_determining() {
            kept = trial;
        }
    }
    Ok(MinimalSubset {
        set: lambda.subset(&kept),
        ids: kept,
    })
}
