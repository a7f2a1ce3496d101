//! Reading descriptors, points and sample configuration from the command line.

use std::fs;
use std::path::Path;

use cnp_core::cnp::{SampleError, SampleSet};
use cnp_core::descriptor::{parse_cplx, PointSpec};
use cnp_core::kernels::BallPoint;
use cnp_core::linalg::HermitianMatrix;
use cnp_core::Cplx;
use serde::de::DeserializeOwned;

use crate::args::SampleArgs;
use crate::CliError;

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file path.
pub fn read_source(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|source| CliError::Io {
        path: arg.to_string(),
        source,
    })
}

pub fn parse_json<T: DeserializeOwned>(what: &'static str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|source| CliError::Json { what, source })
}

fn zero_point(dim: usize) -> BallPoint {
    BallPoint::new(vec![Cplx::new(0.0, 0.0); dim])
}

/// A complex literal for disk kernels; `0` also stands for the origin of a
/// ball. Ball points otherwise need a JSON list.
pub fn parse_base(s: &str, dim: usize) -> Result<BallPoint, CliError> {
    let p = if s.trim_start().starts_with('[') {
        parse_json::<PointSpec>("base point", s)?.0
    } else {
        let z = parse_cplx(s).map_err(|e| CliError::Invalid(format!("--base: {e}")))?;
        if dim > 1 && z.norm() == 0.0 {
            zero_point(dim)
        } else {
            BallPoint::disk(z)
        }
    };
    if p.dim() != dim {
        return Err(CliError::Invalid(format!(
            "base point has dimension {} but the kernel lives in dimension {dim}",
            p.dim()
        )));
    }
    Ok(p)
}

/// Comma-separated complex literals, or a JSON list of points.
pub fn parse_points(s: &str) -> Result<Vec<BallPoint>, CliError> {
    if s.trim_start().starts_with('[') {
        let v: Vec<PointSpec> = parse_json("sample points", s)?;
        return Ok(v.into_iter().map(|p| p.0).collect());
    }
    s.split(',')
        .map(|t| {
            parse_cplx(t)
                .map(BallPoint::disk)
                .map_err(|e| CliError::Invalid(format!("--points: {e}")))
        })
        .collect()
}

pub fn build_samples(args: &SampleArgs, dim: usize) -> Result<SampleSet, CliError> {
    let sample_err = |e: SampleError| CliError::Invalid(format!("sample set: {e}"));
    if let Some(p) = &args.points {
        let pts = parse_points(p)?;
        if let Some(bad) = pts.iter().find(|q| q.dim() != dim) {
            return Err(CliError::Invalid(format!(
                "sample point {bad} has dimension {} but the kernel lives in dimension {dim}",
                bad.dim()
            )));
        }
        return SampleSet::explicit(pts).map_err(sample_err);
    }
    if !(args.rmax > 0.0 && args.rmax < 1.0) {
        return Err(CliError::Invalid(format!("--rmax must lie in (0, 1), got {}", args.rmax)));
    }
    let g = args.grid;
    if dim == 1 {
        SampleSet::grid_plus_random(g.radii, g.angles, args.rmax, args.random, args.seed).map_err(sample_err)
    } else {
        SampleSet::random_ball(g.radii * g.angles + args.random, dim, args.rmax, args.seed).map_err(sample_err)
    }
}

pub fn check_tol(tol: Option<f64>) -> Result<Option<f64>, CliError> {
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(CliError::Invalid(format!("--tol must be positive, got {t}"))),
        t => Ok(t),
    }
}

pub fn export_matrix(path: &Path, m: &HermitianMatrix) -> Result<(), CliError> {
    let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        m.to_csv()
    } else {
        serde_json::to_string_pretty(m).expect("matrix serializes")
    };
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
