//! Counterexamples showing the determining conditions cannot be dropped.
//!
//! * From an annihilating form `Φ(ξ,η) = ⟨φ·(ξ), η⟩` vanishing on Λ, the map
//!   `f(x) = ln|ln|x|| · φ·(x)` has tame directional derivatives along every
//!   pair of Λ but is not `C^k` at the origin: its k-th partials grow like
//!   `ln|ln|x||`.
//! * From a rank-1 witness `(u, v)`, the map `f(z) = h(⟨u,z⟩)·v` has vanishing
//!   first directional derivatives along Λ for any continuous profile `h`,
//!   including nowhere differentiable ones.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::determine::AnnihilatorForm;
use crate::error::{check_dim, domain, Error, Result};
use crate::exec::Execution;
use crate::moment::DirectionSet;
use crate::multiindex::{monomials, IndexBasis, MultiIndex};
use crate::poly::{Polynomial, PolynomialMap};
use crate::reconstruct::{directional_derivative, CentralStencil, FunctionOracle};
use crate::scalar::{dot, norm2_f64, rational_from_f64, Scalar};

/// `1/e`, the outer edge of the domain of the logarithmic counterexample.
pub const DOMAIN_RADIUS: f64 = 0.36787944117144233;

/// Step used for finite differences at radius `r`, as a fraction of `r`.
pub const RELATIVE_STEP: f64 = 1e-2;

/// `φ·(x) = (φ₁(x), …, φ_m(x))` with each `φ_j` homogeneous of degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousMap<S> {
    basis: IndexBasis,
    m: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> HomogeneousMap<S> {
    /// Coefficients in `(α, j)` order; the zero map is rejected.
    pub fn new(basis: IndexBasis, m: usize, coeffs: Vec<S>) -> Result<Self> {
        check_dim(basis.count() * m, coeffs.len())?;
        if coeffs.iter().all(Zero::is_zero) {
            return Err(domain("homogeneous map must have a nonzero coefficient"));
        }
        Ok(HomogeneousMap { basis, m, coeffs })
    }

    pub fn from_form(form: &AnnihilatorForm<S>) -> Self {
        HomogeneousMap {
            basis: form.basis().clone(),
            m: form.m(),
            coeffs: form.coeffs().to_vec(),
        }
    }

    pub fn to_form(&self) -> AnnihilatorForm<S> {
        AnnihilatorForm::new(self.basis.clone(), self.m, self.coeffs.clone())
            .expect("nonzero by construction")
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

    /// `(φ₁(x), …, φ_m(x))`
    pub fn evaluate(&self, x: &[S]) -> Result<Vec<S>> {
        let mons = monomials(x, &self.basis)?;
        let mut out = vec![S::zero(); self.m];
        for (r, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[r % self.m] = out[r % self.m].clone() + c.clone() * mons[r / self.m].clone();
            }
        }
        Ok(out)
    }

    /// `(α, j)` maximising `α!·|φ_{αj}|`, lowest index on ties, with that
    /// weight. `∂^α φ_j ≡ α!·φ_{αj}` for `|α| = k`.
    pub fn dominant_term(&self) -> (MultiIndex, usize, f64) {
        let mut best: Option<(usize, f64)> = None;
        for (r, c) in self.coeffs.iter().enumerate() {
            let alpha = &self.basis.indices()[r / self.m];
            let fact = alpha.factorial().map(|f| f as f64).unwrap_or(f64::INFINITY);
            let w = fact * c.to_f64().abs();
            if best.is_none_or(|(_, bw)| w > bw) {
                best = Some((r, w));
            }
        }
        let (r, w) = best.expect("nonempty basis");
        (self.basis.indices()[r / self.m].clone(), r % self.m, w)
    }

    pub fn to_f64(&self) -> HomogeneousMap<f64> {
        HomogeneousMap {
            basis: self.basis.clone(),
            m: self.m,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl HomogeneousMap<BigRational> {
    pub fn to_polynomial_map(&self) -> PolynomialMap {
        let comps = (0..self.m)
            .map(|j| {
                let terms = self
                    .basis
                    .iter()
                    .enumerate()
                    .map(|(pos, alpha)| (alpha.exponents().to_vec(), self.coeffs[pos * self.m + j].clone()));
                Polynomial::from_terms(self.n(), terms).expect("dimensions agree")
            })
            .collect();
        PolynomialMap::new(comps).expect("m ≥ 1")
    }
}

/// `f(x) = ln|ln|x|| · φ·(x)` on `|x| < 1/e`, `f(0) = 0`.
#[derive(Debug, Clone)]
pub struct LogBlowup {
    phi: HomogeneousMap<f64>,
}

impl LogBlowup {
    pub fn phi(&self) -> &HomogeneousMap<f64> {
        &self.phi
    }
}

impl FunctionOracle<f64> for LogBlowup {
    fn input_dim(&self) -> usize {
        self.phi.n()
    }

    fn output_dim(&self) -> usize {
        self.phi.m()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.phi.n(), x.len())?;
        let r = norm2_f64(x);
        if r == 0.0 {
            return Ok(vec![0.0; self.phi.m()]);
        }
        if r >= DOMAIN_RADIUS {
            return Err(Error::Oracle(format!("|x| = {r} lies outside (0, 1/e)")));
        }
        let scale = (-r.ln()).ln();
        Ok(self.phi.evaluate(x)?.into_iter().map(|v| v * scale).collect())
    }
}

pub fn build_theorem1_counterexample<S: Scalar>(phi: &HomogeneousMap<S>) -> LogBlowup {
    LogBlowup { phi: phi.to_f64() }
}

/// Deterministic unit vectors at which sweeps are sampled: coordinate axes,
/// the diagonal, the alternating diagonal, and a few fixed generic
/// directions.
pub fn sample_directions(n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        out.push(e);
    }
    if n > 1 {
        out.push(vec![1.0; n]);
        out.push((0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect());
        for s in 1..=3 {
            out.push((0..n).map(|i| ((s * 7 + i * 3) as f64 * 0.618).sin()).collect());
        }
    }
    out.into_iter()
        .map(|v| {
            let norm = norm2_f64(&v);
            v.into_iter().map(|c| c / norm).collect()
        })
        .collect()
}

fn at_radius(direction: &[f64], r: f64) -> Vec<f64> {
    direction.iter().map(|c| c * r).collect()
}

/// `∂^α f_j(x)` via a tensor product of central stencils with step `h`.
pub fn finite_difference_partial<O: FunctionOracle<f64> + ?Sized>(
    oracle: &O,
    x: &[f64],
    alpha: &MultiIndex,
    j: usize,
    h: f64,
) -> Result<f64> {
    check_dim(oracle.input_dim(), x.len())?;
    check_dim(oracle.input_dim(), alpha.dim())?;
    if j >= oracle.output_dim() {
        return Err(domain(format!("component {j} out of range")));
    }
    if h <= 0.0 {
        return Err(domain("step h must be positive"));
    }
    // per coordinate: (offset, weight) list
    let mut axes: Vec<Vec<(f64, f64)>> = Vec::with_capacity(x.len());
    for &a in alpha.exponents() {
        if a == 0 {
            axes.push(vec![(0.0, 1.0)]);
        } else {
            let st = CentralStencil::new(a)?;
            axes.push(
                st.offsets()
                    .iter()
                    .zip(st.weights())
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(&o, w)| (o as f64, w.to_f64()))
                    .collect(),
            );
        }
    }
    let mut total = 0.0;
    let mut idx = vec![0usize; axes.len()];
    loop {
        let mut weight = 1.0;
        let mut point = x.to_vec();
        for (i, axis) in axes.iter().enumerate() {
            let (o, w) = axis[idx[i]];
            weight *= w;
            point[i] += o * h;
        }
        total += weight * oracle.evaluate(&point)?[j];
        // odometer over the tensor grid
        let mut carry = 0;
        while carry < axes.len() {
            idx[carry] += 1;
            if idx[carry] < axes[carry].len() {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
        if carry == axes.len() {
            break;
        }
    }
    Ok(total / h.powi(alpha.degree() as i32))
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(domain("sweep needs at least two radii"));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r < DOMAIN_RADIUS)) {
        return Err(domain("radii must lie in (0, 1/e)"));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("radii must be strictly decreasing"));
    }
    Ok(())
}

/// `10^{-3}, …, 10^{-8}`
pub fn default_radii() -> Vec<f64> {
    (3..=8).map(|e| 10f64.powi(-e)).collect()
}

/// `ln|ln r|`
pub fn log_log(r: f64) -> f64 {
    (-r.ln()).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupRow {
    pub radius: f64,
    pub value: f64,
    pub envelope: f64,
    pub ratio: f64,
}

/// Growth of `|∂^α f_j|` against the envelope `α!|φ_{αj}|·ln|ln r|`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    pub alpha: MultiIndex,
    pub component: usize,
    pub weight: f64,
    pub rows: Vec<BlowupRow>,
    pub strictly_increasing: bool,
    pub ratios_within: bool,
}

impl BlowupReport {
    pub fn passed(&self) -> bool {
        self.strictly_increasing && self.ratios_within
    }
}

/// Radii over which strict growth is required.
pub const GROWTH_WINDOW: usize = 5;
pub const ENVELOPE_RATIO_RANGE: (f64, f64) = (0.5, 2.0);

pub fn verify_blowup<S: Scalar>(phi: &HomogeneousMap<S>, radii: &[f64]) -> Result<BlowupReport> {
    verify_blowup_with(phi, radii, Execution::default())
}

pub fn verify_blowup_with<S: Scalar>(
    phi: &HomogeneousMap<S>,
    radii: &[f64],
    exec: Execution,
) -> Result<BlowupReport> {
    check_radii(radii)?;
    let f = build_theorem1_counterexample(phi);
    let (alpha, j, weight) = phi.dominant_term();
    let dirs = sample_directions(phi.n());
    let values = exec
        .map(radii.len(), |i| {
            let r = radii[i];
            dirs.iter().try_fold(0.0f64, |best, w| {
                let d = finite_difference_partial(&f, &at_radius(w, r), &alpha, j, RELATIVE_STEP * r)?;
                Ok(best.max(d.abs()))
            })
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<BlowupRow> = radii
        .iter()
        .zip(&values)
        .map(|(&radius, &value)| {
            let envelope = weight * log_log(radius);
            BlowupRow {
                radius,
                value,
                envelope,
                ratio: value / envelope,
            }
        })
        .collect();
    let tail = &rows[rows.len().saturating_sub(GROWTH_WINDOW)..];
    let strictly_increasing = tail.windows(2).all(|w| w[1].value > w[0].value);
    let (lo, hi) = ENVELOPE_RATIO_RANGE;
    let ratios_within = rows.iter().all(|r| r.ratio >= lo && r.ratio <= hi);
    Ok(BlowupReport {
        alpha,
        component: j,
        weight,
        rows,
        strictly_increasing,
        ratios_within,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamenessRow {
    pub pair: usize,
    pub order: u32,
    /// `max_ω |D_ξ^p⟨f,η⟩(rω)|` per radius.
    pub values: Vec<f64>,
    pub bound: f64,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamenessReport {
    pub radii: Vec<f64>,
    pub rows: Vec<TamenessRow>,
}

impl TamenessReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.bounded)
    }
}

/// Directional values are bounded when they never exceed this multiple of
/// their value at the largest radius.
pub const TAMENESS_FACTOR: f64 = 10.0;

/// Absolute floor for the reference value, below which finite-difference
/// noise dominates.
pub const TAMENESS_FLOOR: f64 = 1e-9;

pub fn verify_directional_tameness<S: Scalar>(
    phi: &HomogeneousMap<S>,
    lambda: &DirectionSet<S>,
    radii: &[f64],
) -> Result<TamenessReport> {
    verify_directional_tameness_with(phi, lambda, radii, Execution::default())
}

pub fn verify_directional_tameness_with<S: Scalar>(
    phi: &HomogeneousMap<S>,
    lambda: &DirectionSet<S>,
    radii: &[f64],
    exec: Execution,
) -> Result<TamenessReport> {
    check_radii(radii)?;
    check_dim(phi.n(), lambda.n())?;
    check_dim(phi.m(), lambda.m())?;
    let form = phi.to_form();
    if !form.vanishes_on(lambda) {
        let bad = lambda
            .pairs()
            .iter()
            .find(|p| !form.evaluate(&p.xi, &p.eta).is_zero())
            .map_or(0, |p| p.id);
        return Err(Error::Precondition(format!(
            "certificate mismatch: Φ does not vanish on pair {bad}"
        )));
    }
    let f = build_theorem1_counterexample(phi);
    let dirs = sample_directions(phi.n());
    let lam = lambda.to_f64();
    let jobs: Vec<(usize, u32)> = lam
        .pairs()
        .iter()
        .flat_map(|p| (1..=phi.k()).map(move |order| (p.id, order)))
        .collect();
    let rows = exec
        .map(jobs.len(), |i| {
            let (id, order) = jobs[i];
            let pair = lam.pair(id);
            let xi_norm = norm2_f64(&pair.xi);
            let values = radii
                .iter()
                .map(|&r| {
                    if xi_norm == 0.0 {
                        return Ok(0.0);
                    }
                    let h = RELATIVE_STEP * r / xi_norm;
                    dirs.iter().try_fold(0.0f64, |best, w| {
                        let d = directional_derivative(&f, &at_radius(w, r), &pair.xi, &pair.eta, order, &h)?;
                        Ok(best.max(d.abs()))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let bound = TAMENESS_FACTOR * values[0].max(TAMENESS_FLOOR);
            let bounded = values.iter().all(|&v| v <= bound);
            Ok(TamenessRow {
                pair: id,
                order,
                values,
                bound,
                bounded,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(TamenessReport {
        radii: radii.to_vec(),
        rows,
    })
}

/// Scalar profile `h` of the rank-1 counterexample.
#[derive(Clone)]
pub enum Profile {
    /// `Σ_{i=0}^{40} aⁱ cos(bⁱ π t)`
    Weierstrass { a: f64, b: f64 },
    Abs,
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

pub const WEIERSTRASS_TERMS: i32 = 41;

impl Profile {
    pub fn weierstrass_default() -> Self {
        Profile::Weierstrass { a: 0.5, b: 3.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Weierstrass { a, b } => (0..WEIERSTRASS_TERMS)
                .map(|i| a.powi(i) * (b.powi(i) * std::f64::consts::PI * t).cos())
                .sum(),
            Profile::Abs => t.abs(),
            Profile::Custom { f, .. } => f(t),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Profile::Weierstrass { a, b } => format!("weierstrass({a},{b})"),
            Profile::Abs => "abs".into(),
            Profile::Custom { name, .. } => name.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Profile::Weierstrass { a, b } = self {
            if !(*a > 0.0 && *a < 1.0) || a * b < 1.0 {
                return Err(domain("weierstrass profile needs 0 < a < 1 and ab ≥ 1"));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// `f(z) = h(⟨u, z⟩) · v`
#[derive(Debug, Clone)]
pub struct RidgeMap {
    u: Vec<f64>,
    v: Vec<f64>,
    profile: Profile,
}

impl RidgeMap {
    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }
}

// ⟨u, z⟩ rounded once, so points differing along u⊥ agree exactly
fn exact_dot(u: &[f64], z: &[f64]) -> f64 {
    let mut acc = BigRational::zero();
    for (a, b) in u.iter().zip(z) {
        match (rational_from_f64(*a), rational_from_f64(*b)) {
            (Some(a), Some(b)) => acc += a * b,
            _ => return dot(u, z),
        }
    }
    acc.to_f64()
}

impl FunctionOracle<f64> for RidgeMap {
    fn input_dim(&self) -> usize {
        self.u.len()
    }

    fn output_dim(&self) -> usize {
        self.v.len()
    }

    fn evaluate(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.u.len(), z.len())?;
        let h = self.profile.eval(exact_dot(&self.u, z));
        Ok(self.v.iter().map(|c| c * h).collect())
    }
}

pub fn build_theorem2_counterexample<S: Scalar>(u: &[S], v: &[S], profile: Profile) -> Result<RidgeMap> {
    if u.is_empty() || u.iter().all(Zero::is_zero) {
        return Err(domain("u must be nonzero"));
    }
    if v.is_empty() || v.iter().all(Zero::is_zero) {
        return Err(domain("v must be nonzero"));
    }
    profile.validate()?;
    Ok(RidgeMap {
        u: u.iter().map(Scalar::to_f64).collect(),
        v: v.iter().map(Scalar::to_f64).collect(),
        profile,
    })
}

/// Step for the first directional differences of the rank-1 sweep.
pub const RIDGE_STEP: f64 = 1.0 / 1024.0;

/// Dyadic base points for the rank-1 sweep.
pub fn ridge_base_points(n: usize) -> Vec<Vec<f64>> {
    let seeds = [0.25, -0.375, 0.5, 0.125, -0.625, 0.75];
    (0..4)
        .map(|s| (0..n).map(|i| seeds[(s + i) % seeds.len()] * if s % 2 == 0 { 1.0 } else { -1.0 }).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishRow {
    pub pair: usize,
    /// `max` over base points of `|D_ξ⟨f,η⟩|`.
    pub value: f64,
    pub tolerance: f64,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientRow {
    pub delta: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeReport {
    pub profile: String,
    pub rows: Vec<VanishRow>,
    pub quotients: Vec<QuotientRow>,
    pub spread_ratio: f64,
    pub sign_change: bool,
}

/// Difference quotients fail to settle when their magnitudes spread by more
/// than this factor.
pub const SPREAD_THRESHOLD: f64 = 2.0;

impl RidgeReport {
    pub fn directional_vanishing(&self) -> bool {
        self.rows.iter().all(|r| r.vanishes)
    }

    pub fn non_convergent(&self) -> bool {
        self.spread_ratio > SPREAD_THRESHOLD || self.sign_change
    }
}

/// `(h(t₀+δ) − h(t₀))/δ` for `δ = ±10^{-1}, …, ±10^{-6}`.
pub fn quotient_sweep(profile: &Profile, t0: f64) -> Vec<QuotientRow> {
    let h0 = profile.eval(t0);
    (1..=6)
        .flat_map(|e| {
            let d = 10f64.powi(-e);
            [d, -d]
        })
        .map(|delta| QuotientRow {
            delta,
            quotient: (profile.eval(t0 + delta) - h0) / delta,
        })
        .collect()
}

/// Checks `⟨u,ξ⟩⟨v,η⟩ = 0` on Λ, then sweeps first directional differences
/// along Λ and difference quotients of the profile at 0.
pub fn verify_theorem2_counterexample<S: Scalar>(
    u: &[S],
    v: &[S],
    profile: Profile,
    lambda: &DirectionSet<S>,
) -> Result<RidgeReport> {
    check_dim(lambda.n(), u.len())?;
    check_dim(lambda.m(), v.len())?;
    for p in lambda.pairs() {
        let prod = dot(u, &p.xi) * dot(v, &p.eta);
        let ok = if S::EXACT {
            prod.is_zero()
        } else {
            let scale = norm2_f64(u) * norm2_f64(&p.xi) * norm2_f64(v) * norm2_f64(&p.eta);
            prod.to_f64().abs() <= 1e-12 * scale.max(1.0)
        };
        if !ok {
            return Err(Error::Precondition(format!(
                "witness mismatch: ⟨u,ξ⟩⟨v,η⟩ ≠ 0 on pair {}",
                p.id
            )));
        }
    }
    let f = build_theorem2_counterexample(u, v, profile.clone())?;
    let lam = lambda.to_f64();
    let bases = ridge_base_points(lam.n());
    let v_norm = norm2_f64(&f.v);
    let mut rows = Vec::with_capacity(lam.len());
    for p in lam.pairs() {
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for z in &bases {
            let d = directional_derivative(&f, z, &p.xi, &p.eta, 1, &RIDGE_STEP)?;
            worst = worst.max(d.abs());
            scale = scale.max(profile.eval(exact_dot(&f.u, z)).abs());
        }
        let tolerance = 1e-9 * (scale * v_norm * norm2_f64(&p.eta)).max(1.0) / RIDGE_STEP;
        rows.push(VanishRow {
            pair: p.id,
            value: worst,
            tolerance,
            vanishes: worst <= tolerance,
        });
    }
    let quotients = quotient_sweep(&profile, 0.0);
    let mags: Vec<f64> = quotients.iter().map(|q| q.quotient.abs()).collect();
    let max = mags.iter().cloned().fold(0.0, f64::max);
    let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread_ratio = if min > 0.0 { max / min } else { f64::INFINITY };
    let sign_change = quotients.iter().any(|q| q.quotient > 0.0) && quotients.iter().any(|q| q.quotient < 0.0);
    Ok(RidgeReport {
        profile: profile.name(),
        rows,
        quotients,
        spread_ratio,
        sign_change,
    })
}

/// Either construction, as requested from the command line.
#[derive(Debug, Clone)]
pub enum CounterexampleSpec<S> {
    Theorem1 { phi: HomogeneousMap<S> },
    Theorem2 { u: Vec<S>, v: Vec<S>, profile: Profile },
}
