//! Direction sets and the moment matrix Δ(ξ*, η*).
//!
//! Rows are indexed by `(α, j)` with `α` ascending and `j` nested inside,
//! columns by selected point ordinal. Entries carry the multinomial factor:
//!
//! ```text
//! Δ[(α,j), p] = (k!/α!) · (ξ^(p))^α · η_j^(p)
//! ```
//!
//! so that the directional derivative identity reads `d = Δᵀ u` with `u` the
//! vector of k-th partials.

use crate::error::{check_dim, domain, Result};
use crate::linalg::{self, Determinant, Matrix};
use crate::multiindex::{enumerate_degree_k, monomials, multinomial_coefficient, IndexBasis};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionPair<S> {
    pub id: usize,
    pub xi: Vec<S>,
    pub eta: Vec<S>,
}

/// Finite ordered set Λ of direction pairs together with the order `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet<S> {
    n: usize,
    m: usize,
    k: u32,
    pairs: Vec<DirectionPair<S>>,
}

impl<S: Scalar> DirectionSet<S> {
    /// Builds Λ from `(ξ, η)` tuples; ids are assigned by position.
    pub fn new(n: usize, m: usize, k: u32, pairs: Vec<(Vec<S>, Vec<S>)>) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(domain("dimensions n and m must be positive"));
        }
        if k == 0 {
            return Err(domain("order k must be at least 1"));
        }
        let pairs = pairs
            .into_iter()
            .enumerate()
            .map(|(id, (xi, eta))| {
                check_dim(n, xi.len())?;
                check_dim(m, eta.len())?;
                if !xi.iter().chain(&eta).all(Scalar::is_finite) {
                    return Err(domain(format!("pair {id} has a non-finite entry")));
                }
                Ok(DirectionPair { id, xi, eta })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DirectionSet { n, m, k, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn pairs(&self) -> &[DirectionPair<S>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, id: usize) -> &DirectionPair<S> {
        &self.pairs[id]
    }

    /// Same pairs read at a different order.
    pub fn with_order(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(domain("order k must be at least 1"));
        }
        Ok(DirectionSet { k, ..self.clone() })
    }

    /// Subset by id, renumbered from zero.
    pub fn subset(&self, ids: &[usize]) -> Self {
        let pairs = ids
            .iter()
            .enumerate()
            .map(|(new_id, &id)| DirectionPair {
                id: new_id,
                ..self.pairs[id].clone()
            })
            .collect();
        DirectionSet {
            n: self.n,
            m: self.m,
            k: self.k,
            pairs,
        }
    }

    pub fn basis(&self) -> IndexBasis {
        enumerate_degree_k(self.n, self.k).expect("validated dimensions")
    }

    /// `m · kₙ`, the side length of the moment matrix.
    pub fn system_dim(&self) -> usize {
        self.m * self.basis().count()
    }

    pub fn to_f64(&self) -> DirectionSet<f64> {
        DirectionSet {
            n: self.n,
            m: self.m,
            k: self.k,
            pairs: self
                .pairs
                .iter()
                .map(|p| DirectionPair {
                    id: p.id,
                    xi: p.xi.iter().map(Scalar::to_f64).collect(),
                    eta: p.eta.iter().map(Scalar::to_f64).collect(),
                })
                .collect(),
        }
    }
}

/// Row of monomial evaluations `ξ^α η_j` for one pair, in `(α, j)` order.
pub fn evaluation_row<S: Scalar>(basis: &IndexBasis, m: usize, xi: &[S], eta: &[S]) -> Vec<S> {
    let mons = monomials(xi, basis).expect("dimension checked by DirectionSet");
    let mut row = Vec::with_capacity(mons.len() * m);
    for mon in &mons {
        for e in eta.iter().take(m) {
            row.push(mon.clone() * e.clone());
        }
    }
    row
}

/// Multinomial weights `k!/α!` per row `(α, j)`.
pub fn row_weights<S: Scalar>(basis: &IndexBasis, m: usize) -> Vec<S> {
    basis
        .iter()
        .flat_map(|alpha| {
            let w = multinomial_coefficient(basis.k(), alpha).expect("degree matches basis");
            std::iter::repeat_n(S::from_count(w), m)
        })
        .collect()
}

/// The `|Λ| × m·kₙ` matrix `E[p, (α,j)] = (ξ^(p))^α η_j^(p)` without
/// multinomial weights.
pub fn evaluation_matrix<S: Scalar>(lambda: &DirectionSet<S>) -> Matrix<S> {
    let basis = lambda.basis();
    Matrix::from_rows(
        lambda
            .pairs()
            .iter()
            .map(|p| evaluation_row(&basis, lambda.m(), &p.xi, &p.eta))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix<S> {
    basis: IndexBasis,
    m: usize,
    points: Vec<DirectionPair<S>>,
    entries: Matrix<S>,
}

impl<S: Scalar> MomentMatrix<S> {
    pub fn basis(&self) -> &IndexBasis {
        &self.basis
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.basis.k()
    }

    pub fn points(&self) -> &[DirectionPair<S>] {
        &self.points
    }

    pub fn entries(&self) -> &Matrix<S> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    /// Ids (positions in the originating Λ) of the selected points.
    pub fn point_ids(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.id).collect()
    }
}

pub fn build_moment_matrix<S: Scalar>(
    points: &[DirectionPair<S>],
    n: usize,
    m: usize,
    k: u32,
) -> Result<MomentMatrix<S>> {
    let basis = enumerate_degree_k(n, k)?;
    let dim = m * basis.count();
    if points.len() != dim {
        return Err(domain(format!(
            "moment matrix needs exactly m·kₙ = {dim} points, got {}",
            points.len()
        )));
    }
    for p in points {
        check_dim(n, p.xi.len())?;
        check_dim(m, p.eta.len())?;
    }
    let weights: Vec<S> = row_weights(&basis, m);
    let columns: Vec<Vec<S>> = points
        .iter()
        .map(|p| evaluation_row(&basis, m, &p.xi, &p.eta))
        .collect();
    let entries = Matrix::from_fn(dim, dim, |r, c| weights[r].clone() * columns[c][r].clone());
    Ok(MomentMatrix {
        basis,
        m,
        points: points.to_vec(),
        entries,
    })
}

/// Moment matrix over the pairs of `lambda` with the given ids.
pub fn moment_matrix_for<S: Scalar>(
    lambda: &DirectionSet<S>,
    ids: &[usize],
) -> Result<MomentMatrix<S>> {
    let points: Vec<DirectionPair<S>> = ids.iter().map(|&i| lambda.pair(i).clone()).collect();
    build_moment_matrix(&points, lambda.n(), lambda.m(), lambda.k())
}

pub fn determinant<S: Scalar>(mm: &MomentMatrix<S>) -> Determinant<S> {
    linalg::determinant(&mm.entries)
}

pub fn rank<S: Scalar>(a: &Matrix<S>, tol: f64) -> usize {
    linalg::rank(a, tol)
}

/// Solves `Δᵀ u = d`: `d_p` is the directional value at point `p`, `u` the
/// partials in `(α, j)` order.
pub fn solve<S: Scalar>(mm: &MomentMatrix<S>, d: &[S]) -> Result<Vec<S>> {
    linalg::solve(&mm.entries.transpose(), d)
}
