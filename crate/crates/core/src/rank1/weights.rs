//! Admissibility of weight sequences `M₀, M₁, …` for Carleman and Beurling
//! classes:
//!
//! 1. `M₀ = 1` and `M_k ≥ k!`;
//! 2. `M_k^{1/k}` strictly increasing;
//! 3. `M_{k+1} ≤ C^k M_k` for some `C`.
//!
//! All arithmetic is on `ln M_k`, so Gevrey sequences stay finite far past
//! the range of `f64`.

use crate::error::{domain, Result};

/// Relative tolerance on log-scale comparisons.
pub const LOG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    /// `M_k = (k!)^ν`
    Gevrey(f64),
    /// `M_k = k!`
    Factorial,
    /// Explicit `M₀, …, M_K`.
    Custom(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    pub family: WeightFamily,
    pub k_max: usize,
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

impl WeightSequence {
    pub fn gevrey(nu: f64, k_max: usize) -> Self {
        WeightSequence {
            family: WeightFamily::Gevrey(nu),
            k_max,
        }
    }

    pub fn factorial(k_max: usize) -> Self {
        WeightSequence {
            family: WeightFamily::Factorial,
            k_max,
        }
    }

    /// `K` is the last index of `values`.
    pub fn custom(values: Vec<f64>) -> Self {
        let k_max = values.len().saturating_sub(1);
        WeightSequence {
            family: WeightFamily::Custom(values),
            k_max,
        }
    }

    pub fn name(&self) -> String {
        match &self.family {
            WeightFamily::Gevrey(nu) => format!("gevrey({nu})"),
            WeightFamily::Factorial => "factorial".into(),
            WeightFamily::Custom(_) => "custom".into(),
        }
    }

    /// `ln M_k` for `k = 0..=K`; nonpositive custom entries map to `−∞`.
    pub fn log_values(&self) -> Vec<f64> {
        (0..=self.k_max)
            .map(|k| match &self.family {
                WeightFamily::Gevrey(nu) => nu * ln_factorial(k),
                WeightFamily::Factorial => ln_factorial(k),
                WeightFamily::Custom(v) => {
                    if v[k] > 0.0 {
                        v[k].ln()
                    } else {
                        f64::NEG_INFINITY
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub passed: bool,
    pub first_failure: Option<usize>,
}

impl ConditionCheck {
    fn from_failure(first_failure: Option<usize>) -> Self {
        ConditionCheck {
            passed: first_failure.is_none(),
            first_failure,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub name: String,
    pub k_max: usize,
    /// `M₀ = 1` and `M_k ≥ k!`.
    pub lower_bound: ConditionCheck,
    /// `M_k = k!` for every `k`.
    pub factorial_equality: bool,
    /// `M_k^{1/k}` strictly increasing, checked from `k = 1`.
    pub increasing: ConditionCheck,
    /// `M_{k+1} ≤ C^k M_k`; index `0` fails when `M₁ > M₀`.
    pub difference: ConditionCheck,
    /// `max_{1≤k<K} (M_{k+1}/M_k)^{1/k}`
    pub smallest_c: Option<f64>,
    pub note: Option<String>,
}

impl WeightReport {
    pub fn passed(&self) -> bool {
        self.lower_bound.passed && self.increasing.passed && self.difference.passed
    }
}

fn tol(x: f64) -> f64 {
    LOG_TOL * x.abs().max(1.0)
}

pub fn validate_weight_sequence(w: &WeightSequence) -> Result<WeightReport> {
    if w.k_max < 2 {
        return Err(domain("weight sequence needs K ≥ 2"));
    }
    if let WeightFamily::Gevrey(nu) = w.family {
        if !nu.is_finite() {
            return Err(domain("Gevrey exponent must be finite"));
        }
    }
    let lm = w.log_values();
    let k_max = w.k_max;

    let lower = if lm[0].abs() > tol(0.0) {
        Some(0)
    } else {
        (1..=k_max).find(|&k| lm[k] < ln_factorial(k) - tol(ln_factorial(k)))
    };
    let factorial_equality = (0..=k_max).all(|k| (lm[k] - ln_factorial(k)).abs() <= tol(ln_factorial(k)));

    let root = |k: usize| lm[k] / k as f64;
    let increasing = (1..k_max).find(|&k| root(k + 1) <= root(k) + tol(root(k))).map(|k| k + 1);

    // any finite sequence admits some C from k = 1 on; k = 0 needs M₁ ≤ M₀
    let first_infinite = lm.iter().position(|v| !v.is_finite());
    let smallest_c = first_infinite.is_none().then(|| {
        (1..k_max)
            .map(|k| ((lm[k + 1] - lm[k]) / k as f64).exp())
            .fold(0.0, f64::max)
    });
    let difference = first_infinite.or_else(|| (lm[1] > lm[0] + tol(lm[0])).then_some(0));

    let note = factorial_equality
        .then(|| "M_k = k! holds with equality; the class is exactly the real-analytic functions".to_string());
    Ok(WeightReport {
        name: w.name(),
        k_max,
        lower_bound: ConditionCheck::from_failure(lower),
        factorial_equality,
        increasing: ConditionCheck::from_failure(increasing),
        difference: ConditionCheck::from_failure(difference),
        smallest_c,
        note,
    })
}
