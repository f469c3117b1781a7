//! Dense linear algebra over [`Scalar`].
//!
//! Rational inputs get exact elimination. Float inputs get partially pivoted
//! elimination, with rank decided by singular values.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default relative cutoff for float rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, dim, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| crate::scalar::dot(self.row(i), v))
            .collect()
    }

    pub fn mul(&self, other: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(S::zero(), |acc, t| {
                acc + self[(i, t)].clone() * other[(t, j)].clone()
            })
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    /// Absolute zero threshold for elimination steps on this matrix.
    fn threshold(&self, tol: f64) -> f64 {
        if S::EXACT {
            0.0
        } else {
            tol * self.max_abs()
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref<S> {
    pub matrix: Matrix<S>,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination. Float pivots below `tol · max|a|` count as zero.
pub fn rref<S: Scalar>(a: &Matrix<S>, tol: f64) -> Rref<S> {
    let threshold = a.threshold(tol);
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let pick = if S::EXACT {
            (row..m.rows).find(|&i| !m[(i, col)].is_zero())
        } else {
            (row..m.rows)
                .max_by(|&x, &y| {
                    m[(x, col)]
                        .abs()
                        .partial_cmp(&m[(y, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&i| !m[(i, col)].is_negligible(threshold))
        };
        let Some(p) = pick else { continue };
        m.swap_rows(row, p);
        let inv = S::one() / m[(row, col)].clone();
        for j in col..m.cols {
            let v = m[(row, j)].clone() * inv.clone();
            m[(row, j)] = v;
        }
        for i in 0..m.rows {
            if i == row || m[(i, col)].is_zero() {
                continue;
            }
            let factor = m[(i, col)].clone();
            for j in col..m.cols {
                let v = m[(i, j)].clone() - factor.clone() * m[(row, j)].clone();
                m[(i, j)] = v;
            }
            if !S::EXACT {
                m[(i, col)] = S::zero();
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { matrix: m, pivots }
}

/// Rank: exact elimination for rationals, singular values above
/// `tol · σ_max` for floats.
pub fn rank<S: Scalar>(a: &Matrix<S>, tol: f64) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    if S::EXACT {
        rref(a, tol).pivots.len()
    } else {
        let sv = a.to_nalgebra().singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * max).count()
    }
}

/// Lowest-index-first maximal set of linearly independent rows.
pub fn independent_rows<S: Scalar>(a: &Matrix<S>, tol: f64) -> Vec<usize> {
    rref(&a.transpose(), tol).pivots
}

/// Lowest-index-first maximal set of linearly independent columns.
pub fn independent_columns<S: Scalar>(a: &Matrix<S>, tol: f64) -> Vec<usize> {
    rref(a, tol).pivots
}

/// Basis of `{x : a x = 0}` read off the reduced echelon form. Each basis
/// vector has a 1 at its free column.
pub fn null_space<S: Scalar>(a: &Matrix<S>, tol: f64) -> Vec<Vec<S>> {
    let Rref { matrix, pivots } = rref(a, tol);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); a.cols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -matrix[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Unit right singular vector of the smallest singular value, with the
/// singular value itself.
pub fn smallest_singular_vector(a: &Matrix<f64>) -> (Vec<f64>, f64) {
    let cols = a.cols;
    // pad so the SVD exposes a full right basis
    let rows = a.rows.max(cols);
    let padded = DMatrix::from_fn(rows, cols, |i, j| if i < a.rows { a[(i, j)] } else { 0.0 });
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .cloned()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty matrix");
    ((0..cols).map(|j| vt[(idx, j)]).collect(), sigma)
}

/// Determinant with its sign and natural-log magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Determinant<S> {
    pub value: S,
    pub sign: i8,
    pub ln_abs: f64,
}

impl<S: Scalar> Determinant<S> {
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

/// LU factorisation `P a = L U` with partial pivoting, stored compactly.
#[derive(Debug, Clone)]
pub struct Lu<S> {
    factors: Matrix<S>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

pub fn lu<S: Scalar>(a: &Matrix<S>) -> Lu<S> {
    assert!(a.is_square(), "LU needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut swaps = 0;
    let mut singular = false;
    for col in 0..n {
        let pick = if S::EXACT {
            (col..n).find(|&i| !m[(i, col)].is_zero())
        } else {
            (col..n)
                .max_by(|&x, &y| {
                    m[(x, col)]
                        .abs()
                        .partial_cmp(&m[(y, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&i| !m[(i, col)].is_zero())
        };
        let Some(p) = pick else {
            singular = true;
            continue;
        };
        if p != col {
            m.swap_rows(p, col);
            perm.swap(p, col);
            swaps += 1;
        }
        let pivot = m[(col, col)].clone();
        for i in col + 1..n {
            if m[(i, col)].is_zero() {
                continue;
            }
            let factor = m[(i, col)].clone() / pivot.clone();
            for j in col + 1..n {
                let v = m[(i, j)].clone() - factor.clone() * m[(col, j)].clone();
                m[(i, j)] = v;
            }
            m[(i, col)] = factor;
        }
    }
    Lu {
        factors: m,
        perm,
        swaps,
        singular,
    }
}

impl<S: Scalar> Lu<S> {
    pub fn dim(&self) -> usize {
        self.factors.rows
    }

    pub fn determinant(&self) -> Determinant<S> {
        if self.singular {
            return Determinant {
                value: S::zero(),
                sign: 0,
                ln_abs: f64::NEG_INFINITY,
            };
        }
        let n = self.dim();
        let mut value = if self.swaps % 2 == 0 { S::one() } else { -S::one() };
        let mut sign: i8 = if self.swaps % 2 == 0 { 1 } else { -1 };
        let mut ln_abs = 0.0;
        for i in 0..n {
            let d = &self.factors[(i, i)];
            value = value * d.clone();
            if d.is_negative() {
                sign = -sign;
            }
            if !S::EXACT {
                ln_abs += d.to_f64().abs().ln();
            }
        }
        if S::EXACT {
            ln_abs = value.ln_abs();
        }
        Determinant { value, sign, ln_abs }
    }

    /// Solves `a x = b`. Float systems with a pivot below `tol · max|a|`
    /// are reported singular.
    pub fn solve(&self, b: &[S], tol: f64) -> Option<Vec<S>> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        if self.singular {
            return None;
        }
        if !S::EXACT {
            let scale = self.factors.max_abs();
            let threshold = tol * scale;
            if (0..n).any(|i| self.factors[(i, i)].is_negligible(threshold)) {
                return None;
            }
        }
        let mut y: Vec<S> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let v = y[i].clone() - self.factors[(i, j)].clone() * y[j].clone();
                y[i] = v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let v = y[i].clone() - self.factors[(i, j)].clone() * y[j].clone();
                y[i] = v;
            }
            let v = y[i].clone() / self.factors[(i, i)].clone();
            y[i] = v;
        }
        Some(y)
    }
}

const SOLVE_TOL: f64 = 1e-14;

pub fn determinant<S: Scalar>(a: &Matrix<S>) -> Determinant<S> {
    if a.rows == 0 {
        return Determinant {
            value: S::one(),
            sign: 1,
            ln_abs: 0.0,
        };
    }
    lu(a).determinant()
}

/// Unique solution of `a x = b`, or a singular error carrying the rank.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<Vec<S>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows,
            got: a.cols,
        });
    }
    crate::error::check_dim(a.rows, b.len())?;
    lu(a).solve(b, SOLVE_TOL).ok_or_else(|| Error::Singular {
        rank: rank(a, DEFAULT_RANK_TOL),
        dim: a.rows,
    })
}

pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.rows;
    let f = lu(a);
    let mut inv = Matrix::zeros(n, n);
    for j in 0..n {
        let e: Vec<S> = (0..n)
            .map(|i| if i == j { S::one() } else { S::zero() })
            .collect();
        let col = f.solve(&e, SOLVE_TOL).ok_or_else(|| Error::Singular {
            rank: rank(a, DEFAULT_RANK_TOL),
            dim: n,
        })?;
        for (i, v) in col.into_iter().enumerate() {
            inv[(i, j)] = v;
        }
    }
    Ok(inv)
}
