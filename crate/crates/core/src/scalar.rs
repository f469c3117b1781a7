//! Scalar abstraction shared by the exact and floating computation paths.
//!
//! A computation runs entirely in one [`Mode`]: either exact rationals
//! ([`BigRational`]) or `f64`. Routines are generic over [`Scalar`] and branch
//! on [`Scalar::EXACT`] only where zero-testing or factorisation differ.

use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Arithmetic mode of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Rational,
    Float,
}

impl Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Rational => f.write_str("rational"),
            Mode::Float => f.write_str("float"),
        }
    }
}

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Send + Sync + Signed + 'static
{
    const EXACT: bool;
    const MODE: Mode;

    fn integer(v: i64) -> Self;
    fn from_count(v: u128) -> Self;
    fn fraction(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact for rationals (every finite `f64` is one); non-finite input
    /// maps to zero.
    fn from_f64_lossy(v: f64) -> Self;
    fn from_rational(v: &BigRational) -> Self;

    /// Zero test under a precomputed absolute threshold. Rationals ignore the
    /// threshold.
    fn is_negligible(&self, threshold: f64) -> bool;

    /// `ln|x|`, finite even where `to_f64` would overflow.
    fn ln_abs(&self) -> f64;

    fn is_finite(&self) -> bool {
        true
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    const MODE: Mode = Mode::Rational;

    fn integer(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_count(v: u128) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn fraction(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator or denominator beyond f64 range
            let n = self.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = self.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    fn from_f64_lossy(v: f64) -> Self {
        BigRational::from_f64(v).unwrap_or_else(BigRational::zero)
    }

    fn from_rational(v: &BigRational) -> Self {
        v.clone()
    }

    fn is_negligible(&self, _threshold: f64) -> bool {
        self.is_zero()
    }

    fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_abs_bigint(self.numer()) - ln_abs_bigint(self.denom())
    }
}

fn ln_abs_bigint(v: &BigInt) -> f64 {
    let a = v.abs();
    let bits = a.bits();
    if bits <= 1000 {
        return a.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = &a >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: Mode = Mode::Float;

    fn integer(v: i64) -> Self {
        v as f64
    }

    fn from_count(v: u128) -> Self {
        v as f64
    }

    fn fraction(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(v: &BigRational) -> Self {
        Scalar::to_f64(v)
    }

    fn from_f64_lossy(v: f64) -> Self {
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }

    fn is_negligible(&self, threshold: f64) -> bool {
        self.abs() <= threshold
    }

    fn ln_abs(&self) -> f64 {
        self.abs().ln()
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Exact conversion of a finite `f64` into a rational.
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_f64(v)
}

/// Rational from a decimal or fraction literal such as `"-3/4"` or `"7"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid_num = {
        let digits = num.strip_prefix('-').unwrap_or(num);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    let valid_den = !den.is_empty() && den.bytes().all(|b| b.is_ascii_digit());
    if !valid_num || !valid_den {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Lowest-terms fraction string; integers print without a denominator.
pub fn format_rational(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub(crate) fn norm2_f64<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn pow<S: Scalar>(base: &S, exp: u32) -> S {
    let mut acc = S::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}
