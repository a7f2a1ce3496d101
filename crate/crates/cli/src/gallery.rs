//! Gallery suites: named `b` functions with expected CNP and criterion verdicts.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use cnp_core::dbr::{self, ExtensionWitness, Overall};
use cnp_core::families::BSpec;
use cnp_core::kernels::BallPoint;
use cnp_core::linalg::{PsdStatus, PsdVerdict};
use cnp_core::series::PowerSeries;
use cnp_core::{CertReport, Cplx, CriterionReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{GridSize, SampleArgs};
use crate::commands::certify;
use crate::input::build_samples;
use crate::{CliError, Outcome};

pub const DEFAULT_SUITE: &str = include_str!("../gallery/default.toml");

/// Base points of the sweep reported for every entry.
pub const SWEEP_BASES: [Cplx; 3] = [Cplx::new(0.0, 0.0), Cplx::new(0.3, 0.1), Cplx::new(0.0, -0.2)];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum WitnessSpec {
    /// `"auto"`: the family's closed form.
    Keyword(String),
    Series(PowerSeries),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SampleConfig {
    pub grid: String,
    pub rmax: f64,
    pub seed: u64,
    pub random: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        let d = SampleArgs::default();
        SampleConfig {
            grid: d.grid.to_string(),
            rmax: d.rmax,
            seed: d.seed,
            random: d.random,
        }
    }
}

impl SampleConfig {
    fn to_args(&self) -> Result<SampleArgs, String> {
        Ok(SampleArgs {
            grid: self.grid.parse::<GridSize>()?,
            rmax: self.rmax,
            seed: self.seed,
            random: self.random,
            points: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub cnp: PsdStatus,
    pub criterion: Overall,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryEntry {
    pub name: String,
    pub b: BSpec,
    #[serde(default)]
    pub witness: Option<WitnessSpec>,
    #[serde(default)]
    pub samples: SampleConfig,
    pub expected: Expected,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub base: Cplx,
    pub status: PsdStatus,
    pub min_eig: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryResult {
    pub name: String,
    pub b: String,
    pub expected: Expected,
    pub observed: Expected,
    pub matched: bool,
    pub cnp: CertReport,
    pub criterion: CriterionReport,
    pub decomposition: PsdVerdict,
    pub sweep: Vec<SweepPoint>,
}

fn suite_value(text: &str, json_format: bool) -> Result<Value, CliError> {
    if json_format {
        serde_json::from_str(text).map_err(|source| CliError::Json { what: "suite", source })
    } else {
        let v: toml::Value = toml::from_str(text).map_err(|e| CliError::Suite(vec![e.to_string()]))?;
        Ok(serde_json::to_value(v).expect("toml values map to json"))
    }
}

/// Accepts `{"entry": [...]}` (TOML `[[entry]]` tables) or a bare list.
/// Every malformed entry is reported, not just the first.
pub fn parse_suite(text: &str, json_format: bool) -> Result<Vec<GalleryEntry>, CliError> {
    let v = suite_value(text, json_format)?;
    let items = match v {
        Value::Array(items) => items,
        Value::Object(mut map) => {
            let items = match map.remove("entry") {
                None => Vec::new(),
                Some(Value::Array(items)) => items,
                Some(_) => return Err(CliError::Suite(vec!["`entry` must be a list of tables".into()])),
            };
            if let Some(k) = map.keys().next() {
                return Err(CliError::Suite(vec![format!("unknown top-level key `{k}`")]));
            }
            items
        }
        _ => return Err(CliError::Suite(vec!["suite must be a table or a list".into()])),
    };
    let mut entries = Vec::with_capacity(items.len());
    let mut problems = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, item) in items.into_iter().enumerate() {
        let label = item
            .get("name")
            .and_then(Value::as_str)
            .map_or_else(|| format!("entry #{i}"), |n| format!("entry `{n}`"));
        match serde_json::from_value::<GalleryEntry>(item) {
            Ok(e) => {
                if !seen.insert(e.name.clone()) {
                    problems.push(format!("{label}: duplicate name"));
                }
                entries.push(e);
            }
            Err(err) => problems.push(format!("{label}: {err}")),
        }
    }
    if problems.is_empty() {
        Ok(entries)
    } else {
        Err(CliError::Suite(problems))
    }
}

fn resolve_witness(spec: &WitnessSpec, b: &BSpec, order: usize) -> Result<ExtensionWitness, String> {
    let q = match spec {
        WitnessSpec::Keyword(k) if k == "auto" => b
            .witness(order)
            .ok_or_else(|| format!("no closed-form witness for {}", b.label()))?,
        WitnessSpec::Keyword(k) => return Err(format!("unknown witness keyword {k:?}")),
        WitnessSpec::Series(s) => s.clone(),
    };
    ExtensionWitness::new(q).map_err(|e| e.to_string())
}

pub fn run_entry(e: &GalleryEntry, order: usize) -> Result<EntryResult, String> {
    let b = e.b.series(order).map_err(|x| x.to_string())?;
    let k = dbr::dbr_kernel(&b).map_err(|x| x.to_string())?;
    let pts = build_samples(&e.samples.to_args()?, 1).map_err(|x| x.to_string())?;
    let witness = e
        .witness
        .as_ref()
        .map(|w| resolve_witness(w, &e.b, order))
        .transpose()?;
    let origin = BallPoint::disk(SWEEP_BASES[0]);
    let (cert, _) = certify(&k, &origin, &pts, None).map_err(|x| x.to_string())?;
    let criterion = dbr::criterion_report(&b, witness.as_ref(), &pts).map_err(|x| x.to_string())?;
    let decomposition = dbr::decomposition_check(&b, &pts, cert.verdict.tol_used).map_err(|x| x.to_string())?;
    let sweep = SWEEP_BASES
        .iter()
        .map(|&z| {
            let (r, _) = certify(&k, &BallPoint::disk(z), &pts, None).map_err(|x| x.to_string())?;
            Ok(SweepPoint {
                base: z,
                status: r.verdict.status,
                min_eig: r.verdict.min_eig,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let observed = Expected {
        cnp: cert.verdict.status,
        criterion: criterion.overall,
    };
    Ok(EntryResult {
        name: e.name.clone(),
        b: e.b.label(),
        expected: e.expected,
        matched: observed == e.expected,
        observed,
        cnp: cert,
        criterion,
        decomposition,
        sweep,
    })
}

/// Runs entries in parallel; results are ordered by name.
pub fn run_suite(entries: &[GalleryEntry], order: usize) -> Result<Vec<EntryResult>, CliError> {
    let outcomes: Vec<(String, Result<EntryResult, String>)> = entries
        .par_iter()
        .map(|e| (e.name.clone(), run_entry(e, order)))
        .collect();
    let mut results = Vec::with_capacity(outcomes.len());
    let mut problems = Vec::new();
    for (name, r) in outcomes {
        match r {
            Ok(r) => results.push(r),
            Err(e) => problems.push(format!("entry `{name}`: {e}")),
        }
    }
    if !problems.is_empty() {
        problems.sort();
        return Err(CliError::Suite(problems));
    }
    results.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(results)
}

pub fn cmd_gallery(suite: Option<&Path>, order: usize) -> Result<Outcome, CliError> {
    let (text, json_format, source) = match suite {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            let json_format = p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
            (text, json_format, p.display().to_string())
        }
        None => (DEFAULT_SUITE.to_string(), false, "built-in".to_string()),
    };
    let entries = parse_suite(&text, json_format)?;
    let results = run_suite(&entries, order)?;
    let mismatched: Vec<&str> = results.iter().filter(|r| !r.matched).map(|r| r.name.as_str()).collect();
    let code = if mismatched.is_empty() { 0 } else { 1 };
    let out = json!({
        "suite": source,
        "n_entries": results.len(),
        "mismatched": mismatched,
        "entries": results,
    });
    let inputs = json!({ "suite": text, "order": order });
    let mut o = Outcome::new("gallery", code, out, inputs);
    o.enveloped = true;
    o.diagnostics = mismatched.iter().map(|n| format!("mismatch: entry `{n}`")).collect();
    Ok(o)
}
