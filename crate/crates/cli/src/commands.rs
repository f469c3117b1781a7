//! Subcommand implementations. Each returns the report and its exit code.

use std::path::{Path, PathBuf};

use dirreg_core::determine::{greedy_select, is_determining, select_well_conditioned, DeterminingVerdict, Selection};
use dirreg_core::moment::determinant;
use dirreg_core::rank1::{
    epsilon_constant, is_rank1_determining, minimal_determining_subset, validate_weight_sequence, Rank1Verdict,
    WeightSequence,
};
use dirreg_core::reconstruct::{reconstruct_from_values, reconstruct_partials, ClosureOracle, ErrorBound};
use dirreg_core::sharpness::{
    default_radii, verify_blowup, verify_directional_tameness, verify_theorem2_counterexample, HomogeneousMap, Profile,
};
use dirreg_core::{BigRational, DirectionSet};
use serde::de::DeserializeOwned;
use sha2::{Digest, Sha256};

use crate::args::{
    base_name, AnalyzeArgs, Command, CounterexampleArgs, Echo, Rank1Args, ReconstructArgs, Select, WeightsArgs,
};
use crate::doc::{
    mode_of, parse_fraction, term_key, DataDocument, DocScalar, Entry, LambdaDocument, ModeName, PhiDocument,
    UvDocument, WeightsDocument, SCHEMA,
};
use crate::error::{exit, CliError};
use crate::polyexpr::parse_poly_map;
use crate::report::*;

/// Environment variable forcing the arithmetic mode.
pub const MODE_ENV: &str = "DIRREG_MODE";

pub struct Outcome {
    pub report: ReportDocument,
    pub code: i32,
    pub out: Option<PathBuf>,
}

#[derive(Default)]
struct Inputs(Vec<InputDigest>);

impl Inputs {
    fn read_bytes(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::input(format!("{}: cannot read: {e}", path.display())))?;
        self.0.push(InputDigest {
            role: role.into(),
            file: base_name(path),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(bytes)
    }

    fn read<T: DeserializeOwned>(&mut self, role: &str, path: &Path) -> Result<T, CliError> {
        let bytes = self.read_bytes(role, path)?;
        serde_json::from_slice(&bytes).map_err(|e| {
            CliError::input(format!("{}: {e}", path.display()))
        })
    }
}

/// The document's mode unless `DIRREG_MODE` overrides it.
pub fn effective_mode(doc: ModeName) -> Result<ModeName, CliError> {
    match std::env::var(MODE_ENV) {
        Ok(v) if !v.trim().is_empty() => ModeName::parse(&v)
            .ok_or_else(|| CliError::usage(format!("{MODE_ENV}={v:?}: expected rational or float"))),
        _ => Ok(doc),
    }
}

fn read_lambda(inputs: &mut Inputs, path: &Path) -> Result<LambdaDocument, CliError> {
    let mut doc: LambdaDocument = inputs.read("lambda", path)?;
    doc.mode = effective_mode(doc.mode)?;
    doc.validate().map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(doc)
}

fn report(name: &str, args: Vec<String>, inputs: Inputs, mode: Option<ModeName>, result: Payload) -> ReportDocument {
    ReportDocument {
        schema: SCHEMA,
        tool: Tool::current(),
        command: CommandEcho {
            name: name.into(),
            args,
        },
        inputs: inputs.0,
        mode,
        result,
    }
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Counterexample(a) => counterexample(a),
        Command::Rank1(a) => rank1(a),
        Command::Weights(a) => weights(a),
    }
}

fn selection_report<S: DocScalar>(sel: &Selection<S>, strategy: Select) -> SelectionReport {
    SelectionReport {
        strategy: strategy.name().into(),
        ids: sel.ids.clone(),
        swaps: sel.swaps,
        stability_b: sel.stability_b.to_entry(),
        ln_abs_det: finite(determinant(&sel.matrix).ln_abs),
    }
}

fn select<S: DocScalar>(lambda: &DirectionSet<S>, strategy: Select) -> Result<DeterminingVerdict<S>, CliError> {
    let verdict = match strategy {
        Select::First => greedy_select(lambda)?,
        Select::Maxvol => select_well_conditioned(lambda)?,
    };
    let reference = is_determining(lambda)?;
    if reference.is_determining() != verdict.is_determining() {
        return Err(CliError::input(
            "selection and rank decision disagree; the float instance is too ill-conditioned to decide",
        ));
    }
    Ok(verdict)
}

// --- analyze -------------------------------------------------------------

fn analyze(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let mut inputs = Inputs::default();
    let doc = read_lambda(&mut inputs, &a.lambda)?;
    let result = match doc.mode {
        ModeName::Rational => analyze_in::<BigRational>(&doc, a.select)?,
        ModeName::Float => analyze_in::<f64>(&doc, a.select)?,
    };
    let code = if result.verdict == Verdict::Determining {
        exit::OK
    } else {
        exit::NEGATIVE
    };
    let args = Echo::new()
        .file("lambda", &Some(a.lambda.clone()))
        .value("select", Some(a.select.name().into()))
        .file("out", &a.out)
        .into_args();
    Ok(Outcome {
        report: report("analyze", args, inputs, Some(doc.mode), Payload::Analyze(result)),
        code,
        out: a.out.clone(),
    })
}

fn analyze_in<S: DocScalar>(doc: &LambdaDocument, strategy: Select) -> Result<AnalyzeResult, CliError> {
    let lambda = doc.direction_set::<S>()?;
    let verdict = select(&lambda, strategy)?;
    Ok(match &verdict {
        DeterminingVerdict::Determining(sel) => AnalyzeResult {
            lambda: doc.clone(),
            system_dim: lambda.system_dim(),
            verdict: Verdict::Determining,
            selection: Some(selection_report(sel, strategy)),
            annihilator: None,
            residual: None,
        },
        DeterminingVerdict::NotDetermining(cert) => AnalyzeResult {
            lambda: doc.clone(),
            system_dim: lambda.system_dim(),
            verdict: Verdict::NotDetermining,
            selection: None,
            annihilator: Some(PhiDocument::from_map(&HomogeneousMap::from_form(&cert.form))),
            residual: finite(cert.residual),
        },
    })
}

// --- reconstruct ---------------------------------------------------------

/// A command-line number: integer, fraction `p/q`, or decimal.
pub fn parse_entry(token: &str) -> Result<Entry, String> {
    let t = token.trim();
    if let Ok(i) = t.parse::<i64>() {
        return Ok(Entry::Int(i));
    }
    if parse_fraction(t).is_some() {
        return Ok(Entry::Text(t.into()));
    }
    match t.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Entry::Float(v)),
        _ => Err(format!("{token:?} is not a number")),
    }
}

fn parse_list(flag: &str, csv: &str) -> Result<Vec<Entry>, CliError> {
    csv.split(',')
        .map(|s| parse_entry(s).map_err(|e| CliError::input(format!("--{flag}: {e}"))))
        .collect()
}

fn reconstruct(a: &ReconstructArgs) -> Result<Outcome, CliError> {
    let mut inputs = Inputs::default();
    let doc = read_lambda(&mut inputs, &a.lambda)?;
    let data: Option<DataDocument> = match &a.data {
        Some(p) => Some(inputs.read("data", p)?),
        None => None,
    };
    let point = match &a.point {
        Some(csv) => parse_list("point", csv)?,
        None => vec![Entry::Int(0); doc.n],
    };
    if point.len() != doc.n {
        return Err(CliError::input(format!("--point: expected {} coordinates, got {}", doc.n, point.len())));
    }
    let step = a.h.as_deref().map(|h| parse_entry(h).map_err(|e| CliError::input(format!("--h: {e}"))));
    let step = step.transpose()?;
    let result = match doc.mode {
        ModeName::Rational => reconstruct_in::<BigRational>(&doc, a, data.as_ref(), &point, step.as_ref())?,
        ModeName::Float => reconstruct_in::<f64>(&doc, a, data.as_ref(), &point, step.as_ref())?,
    };
    let args = Echo::new()
        .file("lambda", &Some(a.lambda.clone()))
        .file("data", &a.data)
        .value("poly", a.poly.clone())
        .value("point", a.point.clone())
        .value("h", a.h.clone())
        .value("select", Some(a.select.name().into()))
        .file("out", &a.out)
        .into_args();
    Ok(Outcome {
        report: report("reconstruct", args, inputs, Some(doc.mode), Payload::Reconstruct(result)),
        code: exit::OK,
        out: a.out.clone(),
    })
}

fn reconstruct_in<S: DocScalar>(
    doc: &LambdaDocument,
    a: &ReconstructArgs,
    data: Option<&DataDocument>,
    point: &[Entry],
    step: Option<&Entry>,
) -> Result<ReconstructResult, CliError> {
    let lambda = doc.direction_set::<S>()?;
    let verdict = select(&lambda, a.select)?;
    let Some(sel) = verdict.selection() else {
        return Err(CliError::NotDetermining(format!(
            "Λ does not determine order-{} regularity; run analyze for the annihilating form",
            doc.k
        )));
    };
    let x = point
        .iter()
        .enumerate()
        .map(|(i, e)| S::from_entry(e, &format!("--point[{i}]")))
        .collect::<Result<Vec<S>, _>>()?;
    let (tensor, source) = match (data, &a.poly) {
        (Some(data), _) => {
            let d = data.values_for::<S>(&sel.ids)?;
            (reconstruct_from_values(sel, &x, &d)?, "data")
        }
        (None, Some(expr)) => {
            let map = parse_poly_map(expr, doc.n, doc.m).map_err(|e| CliError::input(format!("--poly {e}")))?;
            match step {
                None => (reconstruct_partials(&map, &x, &verdict, None)?, "poly"),
                Some(h) => {
                    let h = S::from_entry(h, "--h")?;
                    let oracle = ClosureOracle::new(doc.n, doc.m, move |x: &[S]| map.evaluate(x));
                    (reconstruct_partials(&oracle, &x, &verdict, Some(&h))?, "poly-finite-difference")
                }
            }
        }
        (None, None) => return Err(CliError::usage("one of --data or --poly is required")),
    };
    let partials = tensor.entries().map(|(alpha, j, v)| (term_key(alpha, j), v.to_entry())).collect();
    let error_bound = match tensor.error_bound {
        ErrorBound::Exact => Entry::Text("exact".into()),
        ErrorBound::Bound(b) if b.is_finite() => Entry::Float(b),
        ErrorBound::Bound(_) => Entry::Text("unbounded".into()),
    };
    Ok(ReconstructResult {
        lambda: doc.clone(),
        selection: selection_report(sel, a.select),
        source: source.into(),
        point: x.iter().map(DocScalar::to_entry).collect(),
        step: step.cloned(),
        partials,
        error_bound,
    })
}

// --- counterexample ------------------------------------------------------

pub fn parse_profile(s: &str) -> Result<Profile, CliError> {
    let t = s.trim();
    if t == "abs" {
        return Ok(Profile::Abs);
    }
    if t == "weierstrass" {
        return Ok(Profile::weierstrass_default());
    }
    if let Some(rest) = t.strip_prefix("weierstrass:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if let [a, b] = parts[..] {
            if let (Ok(a), Ok(b)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                return Ok(Profile::Weierstrass { a, b });
            }
        }
    }
    Err(CliError::usage(format!(
        "--profile {s:?}: expected weierstrass, weierstrass:A,B or abs"
    )))
}

fn parse_radii(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|r| {
            r.trim()
                .parse::<f64>()
                .ok()
                .filter(|r| r.is_finite() && *r > 0.0)
                .ok_or_else(|| CliError::input(format!("--radii: {r:?} is not a positive number")))
        })
        .collect()
}

fn no_counterexample(what: &str) -> CliError {
    CliError::NoCounterexample(format!("no counterexample exists for this Λ at this k ({what})"))
}

enum Source {
    Blowup { phi: PhiDocument, lambda: Option<LambdaDocument> },
    Ridge { uv: UvDocument, lambda: LambdaDocument },
}

fn counterexample(a: &CounterexampleArgs) -> Result<Outcome, CliError> {
    if a.from_report.is_none() && a.phi.is_none() && a.uv.is_none() {
        return Err(CliError::usage("one of --from-report, --phi or --uv is required"));
    }
    if a.uv.is_some() && a.lambda.is_none() {
        return Err(CliError::usage("--uv requires --lambda"));
    }
    let mut inputs = Inputs::default();
    let profile = parse_profile(&a.profile)?;
    let radii = match &a.radii {
        Some(s) => parse_radii(s)?,
        None => default_radii(),
    };
    let lambda = match &a.lambda {
        Some(p) => Some(read_lambda(&mut inputs, p)?),
        None => None,
    };
    let source = if let Some(p) = &a.from_report {
        let rep: ReportDocument = inputs.read("report", p)?;
        match rep.result {
            Payload::Analyze(r) => match r.annihilator {
                Some(phi) => Source::Blowup {
                    phi,
                    lambda: Some(r.lambda),
                },
                None => return Err(no_counterexample("the report's verdict is Determining")),
            },
            Payload::Rank1(r) => match r.witness {
                Some(uv) => Source::Ridge { uv, lambda: r.lambda },
                None => return Err(no_counterexample("the report's verdict is Determining1")),
            },
            _ => return Err(CliError::input(format!("{}: not an analyze or rank1 report", p.display()))),
        }
    } else if let Some(p) = &a.phi {
        Source::Blowup {
            phi: inputs.read("phi", p)?,
            lambda,
        }
    } else if let Some(p) = &a.uv {
        Source::Ridge {
            uv: inputs.read("uv", p)?,
            lambda: lambda.expect("checked above"),
        }
    } else {
        return Err(CliError::usage("one of --from-report, --phi or --uv is required"));
    };

    let (mode, result) = match source {
        Source::Blowup { mut phi, mut lambda } => {
            phi.mode = effective_mode(phi.mode)?;
            if let Some(l) = lambda.as_mut() {
                l.mode = phi.mode;
            }
            let r = match phi.mode {
                ModeName::Rational => blowup_in::<BigRational>(&phi, lambda.as_ref(), &radii)?,
                ModeName::Float => blowup_in::<f64>(&phi, lambda.as_ref(), &radii)?,
            };
            (phi.mode, Payload::LogBlowup(r))
        }
        Source::Ridge { mut uv, mut lambda } => {
            uv.mode = effective_mode(uv.mode)?;
            lambda.mode = uv.mode;
            let r = match uv.mode {
                ModeName::Rational => ridge_in::<BigRational>(&uv, &lambda, profile)?,
                ModeName::Float => ridge_in::<f64>(&uv, &lambda, profile)?,
            };
            (uv.mode, Payload::Ridge(r))
        }
    };
    let passed = match &result {
        Payload::LogBlowup(r) => r.passed,
        Payload::Ridge(r) => r.passed,
        _ => unreachable!(),
    };
    let args = Echo::new()
        .file("from-report", &a.from_report)
        .file("phi", &a.phi)
        .file("uv", &a.uv)
        .file("lambda", &a.lambda)
        .value("profile", Some(a.profile.clone()))
        .value("radii", a.radii.clone())
        .file("out", &a.out)
        .into_args();
    Ok(Outcome {
        report: report("counterexample", args, inputs, Some(mode), result),
        code: if passed { exit::OK } else { exit::NEGATIVE },
        out: a.out.clone(),
    })
}

fn blowup_in<S: DocScalar>(
    phi_doc: &PhiDocument,
    lambda: Option<&LambdaDocument>,
    radii: &[f64],
) -> Result<LogBlowupResult, CliError> {
    let phi = phi_doc.homogeneous_map::<S>()?;
    let tameness = match lambda {
        Some(doc) => {
            if (doc.n, doc.m, doc.k) != (phi.n(), phi.m(), phi.k()) {
                return Err(CliError::input(format!(
                    "lambda has (n, m, k) = ({}, {}, {}) but phi has ({}, {}, {})",
                    doc.n,
                    doc.m,
                    doc.k,
                    phi.n(),
                    phi.m(),
                    phi.k()
                )));
            }
            let set = doc.direction_set::<S>()?;
            if is_determining(&set)?.is_determining() {
                return Err(no_counterexample("Λ is determining"));
            }
            let t = verify_directional_tameness(&phi, &set, radii)?;
            Some(TamenessTable {
                radii: t.radii.clone(),
                passed: t.passed(),
                rows: t
                    .rows
                    .iter()
                    .map(|r| TamenessRowOut {
                        pair: r.pair,
                        order: r.order,
                        values: r.values.iter().copied().map(finite).collect(),
                        bound: finite(r.bound),
                        bounded: r.bounded,
                    })
                    .collect(),
            })
        }
        None => None,
    };
    let b = verify_blowup(&phi, radii)?;
    let blowup = BlowupTable {
        term: term_key(&b.alpha, b.component),
        weight: finite(b.weight),
        rows: b
            .rows
            .iter()
            .map(|r| BlowupRowOut {
                radius: r.radius,
                value: finite(r.value),
                envelope: finite(r.envelope),
                ratio: finite(r.ratio),
            })
            .collect(),
        strictly_increasing: b.strictly_increasing,
        ratios_within: b.ratios_within,
        passed: b.passed(),
    };
    let passed = blowup.passed && tameness.as_ref().is_none_or(|t| t.passed);
    Ok(LogBlowupResult {
        phi: PhiDocument::from_map(&phi),
        radii: radii.to_vec(),
        blowup,
        tameness,
        passed,
    })
}

fn ridge_in<S: DocScalar>(
    uv: &UvDocument,
    lambda_doc: &LambdaDocument,
    profile: Profile,
) -> Result<RidgeResult, CliError> {
    let lambda = lambda_doc.direction_set_at::<S>(1)?;
    let (u, v) = uv.vectors::<S>(lambda.n(), lambda.m())?;
    if is_rank1_determining(&lambda)?.is_determining() {
        return Err(no_counterexample("Λ is rank-1 determining"));
    }
    let r = verify_theorem2_counterexample(&u, &v, profile, &lambda)?;
    let directional_vanishing = r.directional_vanishing();
    let non_convergent = r.non_convergent();
    Ok(RidgeResult {
        witness: UvDocument {
            schema: SCHEMA,
            mode: mode_of::<S>(),
            u: u.iter().map(DocScalar::to_entry).collect(),
            v: v.iter().map(DocScalar::to_entry).collect(),
        },
        profile: r.profile.clone(),
        vanishing: r
            .rows
            .iter()
            .map(|row| VanishRowOut {
                pair: row.pair,
                value: finite(row.value),
                tolerance: finite(row.tolerance),
                vanishes: row.vanishes,
            })
            .collect(),
        quotients: r
            .quotients
            .iter()
            .map(|q| QuotientRowOut {
                delta: q.delta,
                quotient: finite(q.quotient),
            })
            .collect(),
        spread_ratio: finite(r.spread_ratio),
        sign_change: r.sign_change,
        directional_vanishing,
        non_convergent,
        passed: directional_vanishing && non_convergent,
    })
}

// --- rank1 ---------------------------------------------------------------

fn rank1(a: &Rank1Args) -> Result<Outcome, CliError> {
    let mut inputs = Inputs::default();
    let doc = read_lambda(&mut inputs, &a.lambda)?;
    let result = match doc.mode {
        ModeName::Rational => rank1_in::<BigRational>(&doc, a)?,
        ModeName::Float => rank1_in::<f64>(&doc, a)?,
    };
    let code = match result.verdict {
        Rank1VerdictName::Determining1 => exit::OK,
        Rank1VerdictName::NotDetermining1 => exit::NEGATIVE,
    };
    let args = Echo::new()
        .file("lambda", &Some(a.lambda.clone()))
        .value("epsilon-l", a.epsilon_l.map(|l| l.to_string()))
        .value("grid", a.epsilon_l.map(|_| a.grid.to_string()))
        .file("out", &a.out)
        .into_args();
    Ok(Outcome {
        report: report("rank1", args, inputs, Some(doc.mode), Payload::Rank1(result)),
        code,
        out: a.out.clone(),
    })
}

fn rank1_in<S: DocScalar>(doc: &LambdaDocument, a: &Rank1Args) -> Result<Rank1Result, CliError> {
    let lambda = doc.direction_set_at::<S>(1)?;
    Ok(match is_rank1_determining(&lambda)? {
        Rank1Verdict::NotDetermining1 { u, v } => Rank1Result {
            lambda: doc.clone(),
            verdict: Rank1VerdictName::NotDetermining1,
            witness: Some(UvDocument {
                schema: SCHEMA,
                mode: mode_of::<S>(),
                u: u.iter().map(DocScalar::to_entry).collect(),
                v: v.iter().map(DocScalar::to_entry).collect(),
            }),
            minimal_subset: None,
            epsilon: None,
        },
        Rank1Verdict::Determining1 => {
            let minimal = minimal_determining_subset(&lambda)?;
            let epsilon = match a.epsilon_l {
                Some(l) => {
                    let e = epsilon_constant(&lambda, l, a.grid)?;
                    Some(EpsilonReport {
                        l: e.l,
                        grid: e.grid,
                        epsilon: e.epsilon,
                        grid_min: e.grid_min,
                        gap: e.gap,
                        u: e.u.iter().map(|x| x + 0.0).collect(),
                        v: e.v.iter().map(|x| x + 0.0).collect(),
                        probes: e.probes,
                    })
                }
                None => None,
            };
            Rank1Result {
                lambda: doc.clone(),
                verdict: Rank1VerdictName::Determining1,
                witness: None,
                minimal_subset: Some(minimal.ids),
                epsilon,
            }
        }
    })
}

// --- weights -------------------------------------------------------------

pub const DEFAULT_K: usize = 50;

fn parse_family(name: &str, k_max: usize) -> Result<WeightSequence, CliError> {
    let t = name.trim();
    if t == "factorial" {
        return Ok(WeightSequence::factorial(k_max));
    }
    let nu = t
        .strip_prefix("gevrey:")
        .or_else(|| t.strip_prefix("gevrey(").and_then(|r| r.strip_suffix(')')))
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|nu| nu.is_finite());
    match nu {
        Some(nu) => Ok(WeightSequence::gevrey(nu, k_max)),
        None => Err(CliError::usage(format!(
            "--family {name:?}: expected factorial, gevrey:NU or gevrey(NU)"
        ))),
    }
}

fn weights(a: &WeightsArgs) -> Result<Outcome, CliError> {
    let mut inputs = Inputs::default();
    if a.k_max.is_some_and(|k| k < 2) {
        return Err(CliError::usage("--K must be at least 2"));
    }
    let seq = match (&a.family, &a.values) {
        (Some(f), _) => parse_family(f, a.k_max.unwrap_or(DEFAULT_K))?,
        (None, Some(p)) => {
            let doc: WeightsDocument = inputs.read("values", p)?;
            let mut values = doc.values()?;
            if let Some(k) = a.k_max {
                if values.len() <= k {
                    return Err(CliError::input(format!(
                        "values: --K {k} needs {} entries, found {}",
                        k + 1,
                        values.len()
                    )));
                }
                values.truncate(k + 1);
            }
            if values.len() < 3 {
                return Err(CliError::input("values: at least three entries M0, M1, M2 are required"));
            }
            WeightSequence::custom(values)
        }
        (None, None) => return Err(CliError::usage("one of --family or --values is required")),
    };
    let r = validate_weight_sequence(&seq)?;
    let check = |c: &dirreg_core::rank1::weights::ConditionCheck| CheckOut {
        passed: c.passed,
        first_failure: c.first_failure,
    };
    let result = WeightsResult {
        name: r.name.clone(),
        k_max: r.k_max,
        lower_bound: check(&r.lower_bound),
        factorial_equality: r.factorial_equality,
        increasing: check(&r.increasing),
        difference: check(&r.difference),
        smallest_c: r.smallest_c.and_then(finite),
        note: r.note.clone(),
        passed: r.passed(),
    };
    let args = Echo::new()
        .value("family", a.family.clone())
        .file("values", &a.values)
        .value("K", a.k_max.map(|k| k.to_string()))
        .file("out", &a.out)
        .into_args();
    Ok(Outcome {
        code: if result.passed { exit::OK } else { exit::NEGATIVE },
        report: report("weights", args, inputs, None, Payload::Weights(result)),
        out: a.out.clone(),
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    use std::io::Write;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let fail = |e: &dyn std::fmt::Display| CliError::input(format!("{}: cannot write: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| fail(&e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| fail(&e))?;
    tmp.flush().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}
