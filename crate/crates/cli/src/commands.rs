use cnp_core::cnp::{self, CnpError, SampleSet};
use cnp_core::dbr::{self, DbrError, ExtensionWitness, Overall};
use cnp_core::descriptor::KernelDescriptor;
use cnp_core::families::BSpec;
use cnp_core::kernels::{BallPoint, KernelExpr};
use cnp_core::linalg::{self, HermitianMatrix, PsdStatus};
use cnp_core::pickinterp::{self, InterpolationProblem, PickError};
use cnp_core::series::PowerSeries;
use cnp_core::CertReport;
use serde_json::{json, Value};

use crate::args::{CnpArgs, HbArgs, PickArgs, SampleArgs};
use crate::input::{self, build_samples, check_tol, parse_base, parse_json, read_source};
use crate::{CliError, Outcome};

pub fn status_code(s: PsdStatus) -> i32 {
    match s {
        PsdStatus::Psd => 0,
        PsdStatus::NotPsd => 1,
        PsdStatus::Inconclusive => 2,
    }
}

pub fn overall_code(o: Overall) -> i32 {
    match o {
        Overall::PassWithExtension => 0,
        Overall::Fail => 1,
        Overall::PassNecessary => 2,
    }
}

fn sample_json(a: &SampleArgs) -> Value {
    json!({
        "grid": a.grid.to_string(),
        "rmax": a.rmax,
        "seed": a.seed,
        "random": a.random,
        "points": a.points,
    })
}

pub fn load_kernel(arg: &str, order: usize) -> Result<(KernelExpr, String), CliError> {
    let text = read_source(arg)?;
    let d: KernelDescriptor = parse_json("kernel descriptor", &text)?;
    Ok((d.resolve(order)?, text))
}

/// Certification with the default tolerance `1e-9·max(1, scale)` of the
/// defect Gram when `tol` is `None`. A vanishing kernel yields its
/// INCONCLUSIVE report rather than an error.
pub fn certify(
    k: &KernelExpr,
    base: &BallPoint,
    pts: &SampleSet,
    tol: Option<f64>,
) -> Result<(CertReport, Option<HermitianMatrix>), CliError> {
    let gram = cnp::defect_gram(k, base, pts).ok().map(|(m, _)| m);
    let tol = tol.unwrap_or_else(|| gram.as_ref().map_or(1e-9, linalg::default_tol));
    match cnp::cnp_certify(k, base, pts, tol) {
        Ok(r) => Ok((r, gram)),
        Err(CnpError::Vanishing(r)) => Ok((*r, None)),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_cnp(a: &CnpArgs, order: usize) -> Result<Outcome, CliError> {
    let tol = check_tol(a.tol)?;
    let (k, text) = load_kernel(&a.kernel, order)?;
    let dim = k.domain_dim().unwrap_or(1);
    let base = parse_base(&a.base, dim)?;
    let pts = build_samples(&a.samples, dim)?;
    let (report, gram) = certify(&k, &base, &pts, tol)?;
    if let (Some(path), Some(m)) = (&a.export_matrix, &gram) {
        input::export_matrix(path, m)?;
    }
    let inputs = json!({
        "kernel": text,
        "base": a.base,
        "samples": sample_json(&a.samples),
        "tol": a.tol,
        "order": order,
    });
    Ok(Outcome::new(
        "cnp",
        status_code(report.verdict.status),
        serde_json::to_value(&report).expect("report serializes"),
        inputs,
    ))
}

pub fn load_b(arg: &str, order: usize) -> Result<(BSpec, PowerSeries, String), CliError> {
    let text = read_source(arg)?;
    let spec: BSpec = parse_json("b-spec", &text)?;
    let b = spec.series(order)?;
    dbr::dbr_kernel(&b)?;
    Ok((spec, b, text))
}

/// `"auto"` takes the family's closed form; anything else is a series literal.
pub fn load_witness(arg: &str, spec: &BSpec, order: usize) -> Result<(ExtensionWitness, String), CliError> {
    if arg.trim() == "auto" {
        let q = spec.witness(order).ok_or_else(|| {
            CliError::Invalid(format!("no closed-form extension witness for {}", spec.label()))
        })?;
        return Ok((ExtensionWitness::new(q)?, "auto".into()));
    }
    let text = read_source(arg)?;
    let q: PowerSeries = parse_json("witness series", &text)?;
    Ok((ExtensionWitness::new(q)?, text))
}

pub fn cmd_hbcheck(a: &HbArgs, order: usize) -> Result<Outcome, CliError> {
    let (spec, b, text) = load_b(&a.b, order)?;
    let witness = a.witness.as_deref().map(|w| load_witness(w, &spec, order)).transpose()?;
    let pts = build_samples(&a.samples, 1)?;
    let report = dbr::criterion_report(&b, witness.as_ref().map(|w| &w.0), &pts).map_err(|e| match e {
        e @ DbrError::WitnessInconsistent { .. } => CliError::Invalid(e.to_string()),
        e => e.into(),
    })?;
    let mut out = serde_json::to_value(&report).expect("report serializes");
    out["b"] = json!(spec.label());
    let inputs = json!({
        "b": text,
        "witness": witness.map(|w| w.1),
        "samples": sample_json(&a.samples),
        "order": order,
    });
    Ok(Outcome::new("hbcheck", overall_code(report.overall), out, inputs))
}

pub fn cmd_pick(a: &PickArgs, order: usize) -> Result<Outcome, CliError> {
    let tol = check_tol(a.tol)?;
    let text = read_source(&a.problem)?;
    let p: InterpolationProblem = parse_json("interpolation problem", &text)?;
    let (k, ktext) = match &a.kernel {
        Some(arg) => {
            let (k, t) = load_kernel(arg, order)?;
            (k, Some(t))
        }
        None => (KernelExpr::Szego, None),
    };
    if k.domain_dim().is_some_and(|d| d != 1) {
        return Err(CliError::Invalid("Pick problems take disk kernels only".into()));
    }
    if a.construct && k != KernelExpr::Szego {
        return Err(CliError::Invalid("--construct is only available for the Szegő kernel".into()));
    }
    let m = linalg::pick_matrix(&k, &p.ball_nodes(), p.targets())?;
    let tol = tol.unwrap_or_else(|| linalg::default_tol(&m));
    let verdict = linalg::psd_verdict(&m, tol);
    if let Some(path) = &a.export_matrix {
        input::export_matrix(path, &m)?;
    }
    let mut code = status_code(verdict.status);
    let mut out = json!({
        "kernel": k.label(),
        "n": p.nodes().len(),
        "verdict": verdict.status,
        "min_eig": verdict.min_eig,
        "tol": verdict.tol_used,
    });
    if a.construct {
        match pickinterp::schur_interpolant(&p) {
            Ok(f) => {
                out["interpolant"] = json!({
                    "schur_parameters": f.params,
                    "residuals": f.residuals(&p),
                    "sup_on_radius_0_999": f.sampled_sup(0.999, 1024),
                });
            }
            Err(e @ PickError::NotStrictlySolvable { .. }) => {
                out["construct_error"] = json!(e.to_string());
                code = 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let inputs = json!({
        "problem": text,
        "kernel": ktext,
        "construct": a.construct,
        "tol": a.tol,
        "order": order,
    });
    Ok(Outcome::new("pick", code, out, inputs))
}
