//! The constant `ε = min_{|u|=|v|=1} F(u, v)`, with
//! `F(u, v) = Σ_{(ξ,η)∈Λ} |⟨η, v⟩|·|⟨ξ, u⟩|^l`.
//!
//! For fixed `u`, `v ↦ F(u, v)` is a polyhedral seminorm, so its minimum on
//! the sphere sits at a direction orthogonal to `m−1` independent `η` of Λ.
//! The inner minimisation over `v` is therefore an exact scan of those
//! directions. The outer one over `u` is seeded from a grid in hyperspherical
//! angles plus the analogous `ξ`-vertex directions, then refined by pattern
//! search. When `l ≤ 1` the outer problem is polyhedral too and the vertex
//! seeds alone attain the minimum.

use crate::error::{check_dim, domain, Error, Result};
use crate::exec::Execution;
use crate::moment::DirectionSet;
use crate::scalar::{dot, norm2_f64, pow, Scalar};

use super::{combinations, common_normal, is_rank1_determining_with, Rank1Verdict};

/// `Σ |⟨η, v⟩|·|⟨ξ, u⟩|^l`, with `0⁰ = 1`.
pub fn objective<S: Scalar>(lambda: &DirectionSet<S>, l: u32, u: &[S], v: &[S]) -> S {
    lambda.pairs().iter().fold(S::zero(), |acc, p| {
        acc + dot(&p.eta, v).abs() * pow(&dot(&p.xi, u).abs(), l)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonEstimate {
    pub l: u32,
    pub grid: usize,
    /// Smallest value of `F` found.
    pub epsilon: f64,
    /// Smallest value on the seeding grid alone.
    pub grid_min: f64,
    /// `(grid_min − ε̂)/grid_min`
    pub gap: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub probes: usize,
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let n = norm2_f64(&v);
    v.into_iter().map(|c| c / n).collect()
}

/// Unit normals of every `(dim−1)`-subset of `rows` with full rank.
fn vertex_directions(rows: &[Vec<f64>], dim: usize) -> Vec<Vec<f64>> {
    let nonzero: Vec<&Vec<f64>> = rows.iter().filter(|r| r.iter().any(|&c| c != 0.0)).collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for s in combinations(nonzero.len(), dim - 1) {
        let chosen: Vec<&[f64]> = s.iter().map(|&i| nonzero[i].as_slice()).collect();
        let a = crate::linalg::Matrix::from_rows(chosen.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        if dim > 1 && crate::linalg::rank(&a, crate::linalg::DEFAULT_RANK_TOL) < dim - 1 {
            continue;
        }
        let Some(n) = common_normal(&chosen, dim) else { continue };
        let n = normalize(n);
        let duplicate = out.iter().any(|o| (dot(o, &n).abs() - 1.0).abs() < 1e-12);
        if !duplicate {
            out.push(n);
        }
    }
    out
}

/// `u_0 = cos θ₀, u_1 = sin θ₀ cos θ₁, …, u_{n−1} = sin θ₀ ⋯ sin θ_{n−2}`
pub(crate) fn from_angles(theta: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(theta.len() + 1);
    let mut s = 1.0;
    for t in theta {
        out.push(s * t.cos());
        s *= t.sin();
    }
    out.push(s);
    out
}

pub(crate) fn to_angles(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n.saturating_sub(1))
        .map(|i| {
            if i == n - 2 {
                u[n - 1].atan2(u[n - 2])
            } else {
                norm2_f64(&u[i + 1..]).atan2(u[i])
            }
        })
        .collect()
}

/// Hemisphere grid: leading angles on `[0, π]`, the last on `[0, π)`.
fn angle_grid(n: usize, grid: usize) -> Vec<Vec<f64>> {
    if n == 1 {
        return vec![vec![]];
    }
    let step = std::f64::consts::PI / grid as f64;
    let mut out = vec![vec![]];
    for axis in 0..n - 1 {
        let count = if axis == n - 2 { grid } else { grid + 1 };
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                (0..count).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i as f64 * step);
                    p
                })
            })
            .collect();
    }
    out
}

struct Problem {
    lambda: DirectionSet<f64>,
    l: u32,
    v_candidates: Vec<Vec<f64>>,
}

impl Problem {
    /// `min_v F(u, v)` and its minimiser.
    fn inner(&self, u: &[f64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (i, v) in self.v_candidates.iter().enumerate() {
            let f = objective(&self.lambda, self.l, u, v);
            if f < best.0 {
                best = (f, i);
            }
        }
        best
    }

    fn at_angles(&self, theta: &[f64]) -> f64 {
        self.inner(&from_angles(theta)).0
    }

    /// Compass search in angle space from `theta`, returning the final
    /// angles, value, and evaluation count.
    fn refine(&self, theta: Vec<f64>, start_step: f64) -> (Vec<f64>, f64, usize) {
        let mut theta = theta;
        let mut value = self.at_angles(&theta);
        let mut probes = 1;
        let mut step = start_step;
        while step > 1e-10 && !theta.is_empty() {
            let mut improved = false;
            for axis in 0..theta.len() {
                for sign in [1.0, -1.0] {
                    let mut trial = theta.clone();
                    trial[axis] += sign * step;
                    let f = self.at_angles(&trial);
                    probes += 1;
                    if f < value {
                        theta = trial;
                        value = f;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        (theta, value, probes)
    }
}

/// Seeds kept for refinement.
pub const REFINE_SEEDS: usize = 8;

pub fn epsilon_constant<S: Scalar>(lambda: &DirectionSet<S>, l: u32, grid: usize) -> Result<EpsilonEstimate> {
    epsilon_constant_with(lambda, l, grid, Execution::default())
}

pub fn epsilon_constant_with<S: Scalar>(
    lambda: &DirectionSet<S>,
    l: u32,
    grid: usize,
    exec: Execution,
) -> Result<EpsilonEstimate> {
    if grid < 8 {
        return Err(domain("grid resolution must be at least 8"));
    }
    if let Rank1Verdict::NotDetermining1 { u, v } = is_rank1_determining_with(lambda, exec)? {
        return Err(Error::Witness {
            u: u.iter().map(Scalar::to_f64).collect(),
            v: v.iter().map(Scalar::to_f64).collect(),
        });
    }
    let lam = lambda.to_f64();
    let (n, m) = (lam.n(), lam.m());
    let etas: Vec<Vec<f64>> = lam.pairs().iter().map(|p| p.eta.clone()).collect();
    let xis: Vec<Vec<f64>> = lam.pairs().iter().map(|p| p.xi.clone()).collect();
    let problem = Problem {
        l,
        v_candidates: vertex_directions(&etas, m),
        lambda: lam,
    };

    let cells = angle_grid(n, grid);
    let grid_values = exec.map(cells.len(), |i| problem.at_angles(&cells[i]));
    let grid_min = grid_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let grid_probes = cells.len();

    let mut seeds: Vec<(f64, Vec<f64>)> = cells.into_iter().zip(grid_values).map(|(c, f)| (f, c)).collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.truncate(REFINE_SEEDS);
    for u in vertex_directions(&xis, n) {
        seeds.push((problem.inner(&u).0, to_angles(&u)));
    }
    let step = std::f64::consts::PI / grid as f64;
    let refined = exec.map(seeds.len(), |i| problem.refine(seeds[i].1.clone(), step));

    let probes = grid_probes + seeds.len() + refined.iter().map(|r| r.2).sum::<usize>();
    let (theta, epsilon) = refined
        .iter()
        .map(|(t, f, _)| (t.clone(), *f))
        .chain(seeds.iter().map(|(f, t)| (t.clone(), *f)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one seed");
    let u = from_angles(&theta);
    let (_, vi) = problem.inner(&u);
    let v = problem.v_candidates[vi].clone();
    if epsilon <= 0.0 {
        return Err(Error::Witness { u, v });
    }
    let gap = if grid_min > 0.0 {
        ((grid_min - epsilon) / grid_min).max(0.0)
    } else {
        0.0
    };
    Ok(EpsilonEstimate {
        l,
        grid,
        epsilon,
        grid_min,
        gap,
        u,
        v,
        probes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationReport {
    pub samples: usize,
    pub violations: usize,
    /// `min F(u,v) / (ε̂|v||u|^l)` over samples with a nonzero right side.
    pub min_ratio: f64,
}

impl PropagationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Relative slack allowed below `ε̂|v||u|^l`.
pub const PROPAGATION_SLACK: f64 = 1e-9;

/// Checks `F(u, v) ≥ ε̂·|v|·|u|^l` at every sample.
pub fn propagation_inequality_check(
    lambda: &DirectionSet<f64>,
    estimate: &EpsilonEstimate,
    samples: &[(Vec<f64>, Vec<f64>)],
) -> Result<PropagationReport> {
    let l = estimate.l;
    let mut violations = 0;
    let mut min_ratio = f64::INFINITY;
    for (u, v) in samples {
        check_dim(lambda.n(), u.len())?;
        check_dim(lambda.m(), v.len())?;
        let lhs = objective(lambda, l, u, v);
        let rhs = estimate.epsilon * norm2_f64(v) * norm2_f64(u).powi(l as i32);
        if lhs < rhs * (1.0 - PROPAGATION_SLACK) {
            violations += 1;
        }
        if rhs > 0.0 {
            min_ratio = min_ratio.min(lhs / rhs);
        }
    }
    Ok(PropagationReport {
        samples: samples.len(),
        violations,
        min_ratio,
    })
}
