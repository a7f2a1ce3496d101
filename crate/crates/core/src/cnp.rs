//! Sampled certification of the complete Nevanlinna-Pick property.
//!
//! A kernel `K` is CNP when the normalized defect
//! `1 - K(z,α)K(α,w) / (K(α,α)K(z,w))` is a positive kernel. On a finite
//! sample set a negative eigenvalue of the defect Gram matrix is a genuine
//! disproof; a PSD matrix is only evidence.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{BallPoint, KernelError, KernelExpr};
use crate::linalg::{self, LinalgError, PsdStatus, PsdVerdict};
use crate::Cplx;

/// Minimum pairwise distance between sample points.
pub const MIN_SEPARATION: f64 = 1e-8;

pub const DEFAULT_RADII: usize = 6;
pub const DEFAULT_ANGLES: usize = 12;
pub const DEFAULT_RMAX: f64 = 0.9;
pub const DEFAULT_RANDOM: usize = 8;
pub const DEFAULT_SEED: u64 = 20;

pub const NOTE_EVIDENCE: &str =
    "PSD on a finite sample is evidence for the CNP property, not a proof; NOT_PSD is a genuine disproof";
pub const NOTE_NONVANISHING: &str = "kernel non-vanishing was checked only at the sampled pairs";
pub const NOTE_SWEEP_ANOMALY: &str =
    "SWEEP_ANOMALY: PSD and NOT_PSD verdicts at different base points; the sample set is too sparse";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("r_max must lie in (0, 1), got {0}")]
    BadRadius(f64),
    #[error("point {0} has modulus above r_max = {1}")]
    OutOfRange(String, f64),
    #[error("points {0} and {1} are closer than {MIN_SEPARATION:e}")]
    TooClose(usize, usize),
    #[error("points have mixed dimensions {0} and {1}")]
    MixedDimension(usize, usize),
    #[error("sample set is empty")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CnpError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("VANISHING_KERNEL during certification: {}", .0.notes.last().map(String::as_str).unwrap_or(""))]
    Vanishing(Box<CertReport>),
    #[error("no sample points remain after removing the base point")]
    NoSamples,
}

/// How a sample set was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SampleGen {
    RadialGrid { n_r: usize, n_theta: usize, r_max: f64 },
    Random { count: usize, r_max: f64, seed: u64 },
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    points: Vec<BallPoint>,
    /// Components this set was assembled from, in order.
    gen: Vec<SampleGen>,
}

impl SampleSet {
    fn checked(points: Vec<BallPoint>, gen: Vec<SampleGen>, r_max: f64) -> Result<Self, SampleError> {
        if points.is_empty() {
            return Err(SampleError::Empty);
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(SampleError::BadRadius(r_max));
        }
        let d = points[0].dim();
        for (i, p) in points.iter().enumerate() {
            if p.dim() != d {
                return Err(SampleError::MixedDimension(d, p.dim()));
            }
            if p.norm_sqr().sqrt() > r_max * (1.0 + 1e-15) || !p.coords.iter().all(|c| c.is_finite()) {
                return Err(SampleError::OutOfRange(p.to_string(), r_max));
            }
            for (j, q) in points[..i].iter().enumerate() {
                if p.dist(q) < MIN_SEPARATION {
                    return Err(SampleError::TooClose(j, i));
                }
            }
        }
        Ok(SampleSet { points, gen })
    }

    /// `n_r` radii `r_max·i/n_r` (`i = 1..=n_r`) times `n_θ` equally spaced
    /// angles. The origin is not included.
    pub fn radial_grid(n_r: usize, n_theta: usize, r_max: f64) -> Result<Self, SampleError> {
        let mut points = Vec::with_capacity(n_r * n_theta);
        for i in 1..=n_r {
            let r = r_max * i as f64 / n_r as f64;
            for j in 0..n_theta {
                let theta = 2.0 * PI * j as f64 / n_theta as f64;
                points.push(BallPoint::disk(Cplx::from_polar(r, theta)));
            }
        }
        Self::checked(points, vec![SampleGen::RadialGrid { n_r, n_theta, r_max }], r_max)
    }

    /// Uniform points in the disk of radius `r_max`.
    pub fn random(count: usize, r_max: f64, seed: u64) -> Result<Self, SampleError> {
        Self::random_ball(count, 1, r_max, seed)
    }

    /// Uniform points in the ball of radius `r_max` in `C^dim`.
    pub fn random_ball(count: usize, dim: usize, r_max: f64, seed: u64) -> Result<Self, SampleError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let real_dim = 2 * dim.max(1);
        let points = (0..count)
            .map(|_| {
                // direction from rejection sampling the cube, radius by inverse CDF
                let dir = loop {
                    let v: Vec<f64> = (0..real_dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let n2: f64 = v.iter().map(|x| x * x).sum();
                    if n2 > 1e-6 && n2 <= 1.0 {
                        break v.iter().map(|x| x / n2.sqrt()).collect::<Vec<_>>();
                    }
                };
                let r = r_max * rng.gen::<f64>().powf(1.0 / real_dim as f64);
                BallPoint::new(dir.chunks(2).map(|p| Cplx::new(r * p[0], r * p[1])).collect())
            })
            .collect();
        Self::checked(points, vec![SampleGen::Random { count, r_max, seed }], r_max)
    }

    pub fn explicit(points: Vec<BallPoint>) -> Result<Self, SampleError> {
        let r_max = points
            .iter()
            .map(|p| p.norm_sqr().sqrt())
            .fold(0.0f64, f64::max);
        if !(r_max < 1.0) {
            return Err(SampleError::BadRadius(r_max));
        }
        Self::checked(points, vec![SampleGen::Explicit], r_max.max(f64::MIN_POSITIVE))
    }

    pub fn explicit_disk(points: &[Cplx]) -> Result<Self, SampleError> {
        Self::explicit(points.iter().map(|&z| BallPoint::disk(z)).collect())
    }

    /// Default certification set: a 6×12 radial grid at `r_max = 0.9` plus
    /// eight seeded random points.
    pub fn default_disk(seed: u64) -> Self {
        Self::grid_plus_random(DEFAULT_RADII, DEFAULT_ANGLES, DEFAULT_RMAX, DEFAULT_RANDOM, seed)
            .expect("default sample parameters are valid")
    }

    pub fn grid_plus_random(
        n_r: usize,
        n_theta: usize,
        r_max: f64,
        count: usize,
        seed: u64,
    ) -> Result<Self, SampleError> {
        let grid = Self::radial_grid(n_r, n_theta, r_max)?;
        if count == 0 {
            return Ok(grid);
        }
        grid.union(&Self::random(count, r_max, seed)?)
    }

    /// Concatenation; points of `other` within `MIN_SEPARATION` of an
    /// existing point are dropped.
    pub fn union(&self, other: &SampleSet) -> Result<Self, SampleError> {
        let mut points = self.points.clone();
        for p in &other.points {
            if points.iter().all(|q| q.dist(p) >= MIN_SEPARATION) {
                points.push(p.clone());
            }
        }
        let r_max = points
            .iter()
            .map(|p| p.norm_sqr().sqrt())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut gen = self.gen.clone();
        gen.extend(other.gen.iter().cloned());
        Self::checked(points, gen, r_max)
    }

    /// Copy without points within `MIN_SEPARATION` of `p`.
    pub fn without(&self, p: &BallPoint) -> SampleSet {
        SampleSet {
            points: self.points.iter().filter(|q| q.dist(p) >= MIN_SEPARATION).cloned().collect(),
            gen: self.gen.clone(),
        }
    }

    pub fn points(&self) -> &[BallPoint] {
        &self.points
    }

    pub fn gen(&self) -> &[SampleGen] {
        &self.gen
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(1, BallPoint::dim)
    }

    /// Disk coordinates, or `None` if the set lives in a higher-dimensional ball.
    pub fn disk_points(&self) -> Option<Vec<Cplx>> {
        self.points.iter().map(BallPoint::as_disk).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub verdict: PsdVerdict,
    pub base: BallPoint,
    pub samples: SampleSet,
    pub vanish_flag: bool,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct CertReportWire<'a> {
    verdict: PsdStatus,
    min_eig: f64,
    tol: f64,
    base: &'a BallPoint,
    n_samples: usize,
    vanish_flag: bool,
    notes: &'a [String],
}

impl Serialize for CertReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CertReportWire {
            verdict: self.verdict.status,
            min_eig: self.verdict.min_eig,
            tol: self.verdict.tol_used,
            base: &self.base,
            n_samples: self.samples.len(),
            vanish_flag: self.vanish_flag,
            notes: &self.notes,
        }
        .serialize(s)
    }
}

/// Gram matrix of the normalized defect of `k` at `base` over `pts`, with
/// `base` itself removed from the sample set.
pub fn defect_gram(
    k: &KernelExpr,
    base: &BallPoint,
    pts: &SampleSet,
) -> Result<(linalg::HermitianMatrix, SampleSet), CnpError> {
    let defect = KernelExpr::cnp_defect(k.clone(), base.clone())?;
    let samples = pts.without(base);
    if samples.is_empty() {
        return Err(CnpError::NoSamples);
    }
    let m = linalg::gram(&defect, samples.points())?;
    Ok((m, samples))
}

pub fn cnp_certify(k: &KernelExpr, base: &BallPoint, pts: &SampleSet, tol: f64) -> Result<CertReport, CnpError> {
    let mut notes = Vec::new();
    if pts.len() != pts.without(base).len() {
        notes.push(format!("base point {base} removed from the sample set"));
    }
    let vanishing = |msg: String, samples: SampleSet| {
        CnpError::Vanishing(Box::new(CertReport {
            verdict: PsdVerdict {
                status: PsdStatus::Inconclusive,
                min_eig: f64::NAN,
                tol_used: tol,
            },
            base: base.clone(),
            samples,
            vanish_flag: true,
            notes: vec![NOTE_NONVANISHING.to_string(), msg],
        }))
    };
    let (m, samples) = match defect_gram(k, base, pts) {
        Ok(x) => x,
        Err(CnpError::Kernel(e @ KernelError::VanishingKernel(_))) => {
            return Err(vanishing(format!("at base: {e}"), pts.without(base)))
        }
        Err(CnpError::Linalg(LinalgError::Assembly {
            i,
            j,
            source: e @ KernelError::VanishingKernel(_),
        })) => return Err(vanishing(format!("at sample pair ({i}, {j}): {e}"), pts.without(base))),
        Err(e) => return Err(e),
    };
    let verdict = linalg::psd_verdict(&m, tol);
    notes.push(NOTE_EVIDENCE.to_string());
    notes.push(NOTE_NONVANISHING.to_string());
    if let Some(w) = m.assembly_warning() {
        notes.push(w);
    }
    if verdict.min_eig.is_nan() {
        notes.push("eigensolver did not converge".to_string());
    }
    Ok(CertReport {
        verdict,
        base: base.clone(),
        samples,
        vanish_flag: false,
        notes,
    })
}

/// One report per base. Disagreement between PSD and NOT_PSD across bases
/// appends a `SWEEP_ANOMALY` note to every report.
pub fn cnp_basepoint_sweep(
    k: &KernelExpr,
    bases: &[BallPoint],
    pts: &SampleSet,
    tol: f64,
) -> Result<Vec<CertReport>, CnpError> {
    let mut reports = bases
        .iter()
        .map(|b| cnp_certify(k, b, pts, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let has = |s| reports.iter().any(|r| r.verdict.status == s);
    if has(PsdStatus::Psd) && has(PsdStatus::NotPsd) {
        for r in &mut reports {
            r.notes.push(NOTE_SWEEP_ANOMALY.to_string());
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::PowerSeries;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn origin() -> BallPoint {
        BallPoint::disk(c(0.0, 0.0))
    }

    fn zsq() -> KernelExpr {
        KernelExpr::Dbr {
            b: PowerSeries::from_real(&[0.0, 0.0, 1.0]).unwrap(),
        }
    }

    #[test]
    fn grid_shape() {
        let s = SampleSet::radial_grid(4, 8, 0.9).unwrap();
        assert_eq!(s.len(), 32);
        assert!(s.points().iter().all(|p| p.norm_sqr().sqrt() <= 0.9 + 1e-15));
        assert!(s.points().iter().all(|p| p.norm_sqr() > 0.0));
        let d = SampleSet::default_disk(DEFAULT_SEED);
        assert_eq!(d.len(), 80);
        assert_eq!(d.gen().len(), 2);
    }

    #[test]
    fn sample_validation() {
        assert!(matches!(SampleSet::radial_grid(2, 2, 1.0), Err(SampleError::BadRadius(_))));
        assert!(matches!(
            SampleSet::explicit_disk(&[c(0.1, 0.0), c(0.1, 1e-10)]),
            Err(SampleError::TooClose(0, 1))
        ));
        assert!(SampleSet::explicit_disk(&[c(0.1, 0.0), c(1.0, 0.0)]).is_err());
        assert!(matches!(SampleSet::explicit(vec![]), Err(SampleError::Empty)));
    }

    #[test]
    fn random_is_seeded() {
        let a = SampleSet::random(10, 0.8, 3).unwrap();
        let b = SampleSet::random(10, 0.8, 3).unwrap();
        let c2 = SampleSet::random(10, 0.8, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c2);
        let ball = SampleSet::random_ball(20, 3, 0.95, 1).unwrap();
        assert_eq!(ball.dim(), 3);
        assert!(ball.points().iter().all(|p| p.norm_sqr() < 0.95 * 0.95 + 1e-12));
    }

    #[test]
    fn szego_positive() {
        let pts = SampleSet::radial_grid(4, 8, 0.9).unwrap();
        let r = cnp_certify(&KernelExpr::szego(), &origin(), &pts, 1e-9).unwrap();
        assert_eq!(r.verdict.status, PsdStatus::Psd);
        assert!(!r.vanish_flag);
        assert!(r.notes.iter().any(|n| n == NOTE_EVIDENCE));
    }

    #[test]
    fn zsq_negative_certificate() {
        let pts = SampleSet::explicit_disk(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let r = cnp_certify(&zsq(), &origin(), &pts, 1e-9).unwrap();
        assert_eq!(r.verdict.status, PsdStatus::NotPsd);
        assert!((r.verdict.min_eig - (0.2 - 1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn blaschke_degree_one_defect_vanishes() {
        let b = crate::pickinterp::blaschke_product(&[c(0.3, -0.2)], 64);
        let k = KernelExpr::Dbr { b };
        let pts = SampleSet::default_disk(DEFAULT_SEED);
        for base in [origin(), BallPoint::disk(c(0.3, 0.1))] {
            let r = cnp_certify(&k, &base, &pts, 1e-9).unwrap();
            assert_eq!(r.verdict.status, PsdStatus::Psd);
            assert!(r.verdict.min_eig.abs() < 1e-10);
        }
    }

    #[test]
    fn base_removed_from_samples() {
        let pts = SampleSet::explicit_disk(&[c(0.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let r = cnp_certify(&zsq(), &origin(), &pts, 1e-9).unwrap();
        assert_eq!(r.samples.len(), 2);
        assert!(r.notes[0].contains("removed"));
        let only = SampleSet::explicit_disk(&[c(0.0, 0.0)]).unwrap();
        assert!(matches!(cnp_certify(&zsq(), &origin(), &only, 1e-9), Err(CnpError::NoSamples)));
    }

    #[test]
    fn vanishing_sets_flag() {
        // z·conj(w)·k^S vanishes whenever z = 0
        let k = KernelExpr::congruence(KernelExpr::szego(), PowerSeries::from_real(&[0.0, 1.0]).unwrap()).unwrap();
        let pts = SampleSet::explicit_disk(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        match cnp_certify(&k, &BallPoint::disk(c(0.3, 0.0)), &pts, 1e-9) {
            Err(CnpError::Vanishing(r)) => {
                assert!(r.vanish_flag);
                assert_eq!(r.verdict.status, PsdStatus::Inconclusive);
            }
            other => panic!("unexpected {other:?}"),
        }
        match cnp_certify(&k, &origin(), &pts, 1e-9) {
            Err(CnpError::Vanishing(r)) => assert!(r.vanish_flag),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sweep_examples() {
        let pts = SampleSet::radial_grid(4, 8, 0.9).unwrap();
        let bases = [origin(), BallPoint::disk(c(0.3, 0.1))];
        let rs = cnp_basepoint_sweep(&KernelExpr::szego(), &bases, &pts, 1e-9).unwrap();
        assert!(rs.iter().all(|r| r.verdict.status == PsdStatus::Psd));

        let pts = SampleSet::explicit_disk(&[c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.3)]).unwrap();
        let bases = [origin(), BallPoint::disk(c(0.2, 0.0))];
        let rs = cnp_basepoint_sweep(&zsq(), &bases, &pts, 1e-9).unwrap();
        assert!(rs.iter().all(|r| r.verdict.status == PsdStatus::NotPsd), "{rs:?}");
        assert!(rs.iter().all(|r| !r.notes.iter().any(|n| n == NOTE_SWEEP_ANOMALY)));

        assert!(cnp_basepoint_sweep(&zsq(), &[], &pts, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn drury_arveson_ball_samples() {
        for d in 1..=3 {
            let k = KernelExpr::drury_arveson(d).unwrap();
            let pts = SampleSet::random_ball(30, d, 0.9, 11 + d as u64).unwrap();
            let base = BallPoint::new(vec![c(0.0, 0.0); d]);
            let r = cnp_certify(&k, &base, &pts, 1e-9).unwrap();
            assert_eq!(r.verdict.status, PsdStatus::Psd, "d={d}");
        }
    }

    #[test]
    fn report_json_schema() {
        let pts = SampleSet::explicit_disk(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let r = cnp_certify(&zsq(), &origin(), &pts, 1e-9).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "NOT_PSD");
        assert_eq!(v["n_samples"], 2);
        assert_eq!(v["vanish_flag"], false);
        for key in ["min_eig", "tol", "base", "notes"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
