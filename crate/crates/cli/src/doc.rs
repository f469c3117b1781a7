//! Input documents: `lambda.json`, `data.json`, `phi.json`, `uv.json` and
//! weight lists. Every document carries `"schema": 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use dirreg_core::multiindex::{enumerate_degree_k, MultiIndex};
use dirreg_core::sharpness::HomogeneousMap;
use dirreg_core::{BigRational, DirectionSet, Mode, Scalar};
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Rational,
    Float,
}

impl ModeName {
    pub fn mode(self) -> Mode {
        match self {
            ModeName::Rational => Mode::Rational,
            ModeName::Float => Mode::Float,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" => Some(ModeName::Rational),
            "float" => Some(ModeName::Float),
            _ => None,
        }
    }
}

impl fmt::Display for ModeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.mode().fmt(f)
    }
}

/// A number as written in a document: an integer, a decimal, or a string
/// `"p"` / `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Float(f64),
    Text(String),
}

fn fraction_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^-?\d+(/\d+)?$").unwrap())
}

impl Entry {
    pub fn rational(v: &BigRational) -> Self {
        Entry::Text(v.to_string())
    }

    pub fn to_rational(&self, path: &str) -> Result<BigRational, CliError> {
        match self {
            Entry::Int(i) => Ok(BigRational::integer(*i)),
            Entry::Float(_) => Err(CliError::input(format!(
                "{path}: decimal numbers are not allowed in rational mode; write a fraction string such as \"1/2\""
            ))),
            Entry::Text(s) => parse_fraction(s).ok_or_else(|| {
                CliError::input(format!("{path}: {s:?} is not an integer or fraction string p/q with q > 0"))
            }),
        }
    }

    pub fn to_float(&self, path: &str) -> Result<f64, CliError> {
        let v = match self {
            Entry::Int(i) => *i as f64,
            Entry::Float(f) => *f,
            Entry::Text(s) => parse_fraction(s)
                .map(|q| Scalar::to_f64(&q))
                .ok_or_else(|| CliError::input(format!("{path}: {s:?} is not a number or fraction string")))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::input(format!("{path}: value is not finite")))
        }
    }

    pub fn to_scalar<S: DocScalar>(&self, path: &str) -> Result<S, CliError> {
        S::from_entry(self, path)
    }
}

pub fn parse_fraction(s: &str) -> Option<BigRational> {
    if !fraction_re().is_match(s) {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num.parse().ok()?;
    let den: num_bigint::BigInt = den.parse().ok()?;
    if den == num_bigint::BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Scalars that can be read from and written to documents.
pub trait DocScalar: Scalar {
    fn from_entry(e: &Entry, path: &str) -> Result<Self, CliError>;
    fn to_entry(&self) -> Entry;
}

impl DocScalar for BigRational {
    fn from_entry(e: &Entry, path: &str) -> Result<Self, CliError> {
        e.to_rational(path)
    }

    fn to_entry(&self) -> Entry {
        Entry::rational(self)
    }
}

impl DocScalar for f64 {
    fn from_entry(e: &Entry, path: &str) -> Result<Self, CliError> {
        e.to_float(path)
    }

    fn to_entry(&self) -> Entry {
        Entry::Float(*self)
    }
}

fn check_schema(schema: u32, what: &str) -> Result<(), CliError> {
    if schema == SCHEMA {
        Ok(())
    } else {
        Err(CliError::input(format!("{what}: unsupported schema {schema} (expected {SCHEMA})")))
    }
}

fn entries<S: DocScalar>(xs: &[Entry], len: usize, path: &str) -> Result<Vec<S>, CliError> {
    if xs.len() != len {
        return Err(CliError::input(format!("{path}: expected {len} entries, got {}", xs.len())));
    }
    xs.iter()
        .enumerate()
        .map(|(i, e)| S::from_entry(e, &format!("{path}[{i}]")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    pub xi: Vec<Entry>,
    pub eta: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaDocument {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub mode: ModeName,
    pub points: Vec<PointEntry>,
}

impl LambdaDocument {
    pub fn validate(&self) -> Result<(), CliError> {
        check_schema(self.schema, "lambda")?;
        if self.n == 0 || self.m == 0 {
            return Err(CliError::input("lambda: n and m must be at least 1"));
        }
        if self.points.is_empty() {
            return Err(CliError::input("lambda.points: at least one pair is required"));
        }
        match self.mode {
            ModeName::Rational => self.direction_set::<BigRational>().map(drop),
            ModeName::Float => self.direction_set::<f64>().map(drop),
        }
    }

    pub fn direction_set<S: DocScalar>(&self) -> Result<DirectionSet<S>, CliError> {
        self.direction_set_at::<S>(self.k)
    }

    pub fn direction_set_at<S: DocScalar>(&self, k: u32) -> Result<DirectionSet<S>, CliError> {
        let pairs = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                Ok((
                    entries(&p.xi, self.n, &format!("points[{i}].xi"))?,
                    entries(&p.eta, self.m, &format!("points[{i}].eta"))?,
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        DirectionSet::new(self.n, self.m, k, pairs).map_err(|e| CliError::input(format!("lambda: {e}")))
    }

    pub fn from_set<S: DocScalar>(lambda: &DirectionSet<S>) -> Self {
        LambdaDocument {
            schema: SCHEMA,
            n: lambda.n(),
            m: lambda.m(),
            k: lambda.k(),
            mode: mode_of::<S>(),
            points: lambda
                .pairs()
                .iter()
                .map(|p| PointEntry {
                    xi: p.xi.iter().map(DocScalar::to_entry).collect(),
                    eta: p.eta.iter().map(DocScalar::to_entry).collect(),
                })
                .collect(),
        }
    }
}

pub fn mode_of<S: Scalar>() -> ModeName {
    match S::MODE {
        Mode::Rational => ModeName::Rational,
        Mode::Float => ModeName::Float,
    }
}

/// Directional values keyed by pair id (0-based, as in `lambda.points`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataDocument {
    pub schema: u32,
    pub values: BTreeMap<String, Entry>,
}

impl DataDocument {
    /// Values for `ids`, in that order.
    pub fn values_for<S: DocScalar>(&self, ids: &[usize]) -> Result<Vec<S>, CliError> {
        check_schema(self.schema, "data")?;
        let mut by_id = BTreeMap::new();
        for (key, v) in &self.values {
            let id: usize = key
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("data.values: key {key:?} is not a pair id")))?;
            by_id.insert(id, (key, v));
        }
        let missing: Vec<String> = ids.iter().filter(|i| !by_id.contains_key(i)).map(|i| i.to_string()).collect();
        if !missing.is_empty() {
            return Err(CliError::input(format!(
                "data.values: missing directional values for selected ids {}",
                missing.join(", ")
            )));
        }
        ids.iter()
            .map(|i| {
                let (key, v) = by_id[i];
                S::from_entry(v, &format!("data.values.{key}"))
            })
            .collect()
    }
}

/// Coefficients of a homogeneous map keyed `"a1,…,an|j"` with `j` 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiDocument {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub mode: ModeName,
    pub coefficients: BTreeMap<String, Entry>,
}

pub fn term_key(alpha: &MultiIndex, j: usize) -> String {
    format!("{alpha}|{}", j + 1)
}

impl PhiDocument {
    pub fn homogeneous_map<S: DocScalar>(&self) -> Result<HomogeneousMap<S>, CliError> {
        check_schema(self.schema, "phi")?;
        let basis = enumerate_degree_k(self.n, self.k).map_err(|e| CliError::input(format!("phi: {e}")))?;
        if self.m == 0 {
            return Err(CliError::input("phi: m must be at least 1"));
        }
        let mut coeffs = vec![S::zero(); basis.count() * self.m];
        for (key, v) in &self.coefficients {
            let path = format!("coefficients.{key:?}");
            let (alpha, j) = key
                .split_once('|')
                .ok_or_else(|| CliError::input(format!("{path}: key must look like \"a1,...,an|j\"")))?;
            let exps = alpha
                .split(',')
                .map(|s| s.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::input(format!("{path}: exponents must be nonnegative integers")))?;
            let alpha = MultiIndex::new(exps).map_err(|e| CliError::input(format!("{path}: {e}")))?;
            let pos = basis
                .position(&alpha)
                .ok_or_else(|| CliError::input(format!("{path}: not a multi-index of length {} and degree {}", self.n, self.k)))?;
            let j: usize = j
                .trim()
                .parse()
                .ok()
                .filter(|j| (1..=self.m).contains(j))
                .ok_or_else(|| CliError::input(format!("{path}: component must be in 1..={}", self.m)))?;
            coeffs[pos * self.m + j - 1] = S::from_entry(v, &path)?;
        }
        HomogeneousMap::new(basis, self.m, coeffs).map_err(|e| CliError::input(format!("phi: {e}")))
    }

    pub fn from_map<S: DocScalar>(phi: &HomogeneousMap<S>) -> Self {
        let mut coefficients = BTreeMap::new();
        for (r, c) in phi.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let alpha = &phi.basis().indices()[r / phi.m()];
                coefficients.insert(term_key(alpha, r % phi.m()), c.to_entry());
            }
        }
        PhiDocument {
            schema: SCHEMA,
            n: phi.n(),
            m: phi.m(),
            k: phi.k(),
            mode: mode_of::<S>(),
            coefficients,
        }
    }
}

/// A rank-one witness `(u, v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UvDocument {
    pub schema: u32,
    pub mode: ModeName,
    pub u: Vec<Entry>,
    pub v: Vec<Entry>,
}

impl UvDocument {
    pub fn vectors<S: DocScalar>(&self, n: usize, m: usize) -> Result<(Vec<S>, Vec<S>), CliError> {
        check_schema(self.schema, "uv")?;
        Ok((entries(&self.u, n, "u")?, entries(&self.v, m, "v")?))
    }
}

/// An explicit weight list `M₀, …, M_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsDocument {
    pub schema: u32,
    pub values: Vec<Entry>,
}

impl WeightsDocument {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        check_schema(self.schema, "weights")?;
        self.values
            .iter()
            .enumerate()
            .map(|(i, e)| e.to_float(&format!("values[{i}]")))
            .collect()
    }
}
