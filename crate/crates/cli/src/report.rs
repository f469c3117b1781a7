//! Report documents written by every subcommand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::doc::{Entry, LambdaDocument, ModeName, PhiDocument, UvDocument};

pub const TOOL_NAME: &str = "dirreg";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub schema: u32,
    pub tool: Tool,
    pub command: CommandEcho,
    pub inputs: Vec<InputDigest>,
    pub mode: Option<ModeName>,
    pub result: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Tool {
    pub fn current() -> Self {
        Tool {
            name: TOOL_NAME.into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// Subcommand and its arguments, with file paths reduced to base names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDigest {
    pub role: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Analyze(AnalyzeResult),
    Reconstruct(ReconstructResult),
    LogBlowup(LogBlowupResult),
    Ridge(RidgeResult),
    Rank1(Rank1Result),
    Weights(WeightsResult),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Determining,
    NotDetermining,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionReport {
    pub strategy: String,
    pub ids: Vec<usize>,
    pub swaps: usize,
    pub stability_b: Entry,
    pub ln_abs_det: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeResult {
    pub lambda: LambdaDocument,
    pub system_dim: usize,
    pub verdict: Verdict,
    pub selection: Option<SelectionReport>,
    /// The annihilating form, as a `phi.json` document.
    pub annihilator: Option<PhiDocument>,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructResult {
    pub lambda: LambdaDocument,
    pub selection: SelectionReport,
    pub source: String,
    pub point: Vec<Entry>,
    pub step: Option<Entry>,
    /// `∂^α f_j` keyed `"α|j"`.
    pub partials: BTreeMap<String, Entry>,
    /// `"exact"` or an absolute bound.
    pub error_bound: Entry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupRowOut {
    pub radius: f64,
    pub value: Option<f64>,
    pub envelope: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupTable {
    /// Dominant term `"α|j"`.
    pub term: String,
    pub weight: Option<f64>,
    pub rows: Vec<BlowupRowOut>,
    pub strictly_increasing: bool,
    pub ratios_within: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TamenessRowOut {
    pub pair: usize,
    pub order: u32,
    pub values: Vec<Option<f64>>,
    pub bound: Option<f64>,
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TamenessTable {
    pub radii: Vec<f64>,
    pub rows: Vec<TamenessRowOut>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogBlowupResult {
    pub phi: PhiDocument,
    pub radii: Vec<f64>,
    pub blowup: BlowupTable,
    pub tameness: Option<TamenessTable>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VanishRowOut {
    pub pair: usize,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientRowOut {
    pub delta: f64,
    pub quotient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RidgeResult {
    pub witness: UvDocument,
    pub profile: String,
    pub vanishing: Vec<VanishRowOut>,
    pub quotients: Vec<QuotientRowOut>,
    /// `null` when some quotient is zero.
    pub spread_ratio: Option<f64>,
    pub sign_change: bool,
    pub directional_vanishing: bool,
    pub non_convergent: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rank1VerdictName {
    Determining1,
    NotDetermining1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonReport {
    pub l: u32,
    pub grid: usize,
    pub epsilon: f64,
    pub grid_min: f64,
    pub gap: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rank1Result {
    pub lambda: LambdaDocument,
    pub verdict: Rank1VerdictName,
    /// A `uv.json` document.
    pub witness: Option<UvDocument>,
    pub minimal_subset: Option<Vec<usize>>,
    pub epsilon: Option<EpsilonReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOut {
    pub passed: bool,
    pub first_failure: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsResult {
    pub name: String,
    pub k_max: usize,
    pub lower_bound: CheckOut,
    pub factorial_equality: bool,
    pub increasing: CheckOut,
    pub difference: CheckOut,
    pub smallest_c: Option<f64>,
    pub note: Option<String>,
    pub passed: bool,
}

/// `None` for values JSON cannot hold.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub fn to_json(report: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}
