//! de Branges-Rovnyak spaces `H(b)`: kernel construction and the checks of
//! the CNP criterion for `H(b)`.
//!
//! `H(b)` is CNP exactly when `b` has a holomorphic left inverse `h`
//! (`h(b(z)) = z`) such that `q(z) = (z - b(0)) / h(z)` extends holomorphically
//! to the disk with `|q(z)| ≤ |1 - conj(b(0)) z|`. Numerically this splits
//! into
//!
//! * necessary checks that only look at `b(𝔻)`: injectivity of `b`, the
//!   series inverse `h` and the bound at `z = b(ζ)`
//!   ([`schwarz_pick_check`]);
//! * a sufficient check that needs a caller-supplied extension `q`
//!   ([`extension_check`]), since the continuation of `q` beyond `b(𝔻)`
//!   cannot be recovered from a truncated series about `b(0)`.
//!
//! [`decomposition_check`] and [`witness_identity_check`] reproduce the
//! intermediate steps of the characterization: the kernel inequality
//! `K1 ≼ K2 + K0` and the algebraic identity tying `f`, `g` and `h`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnp::SampleSet;
use crate::kernels::{self, BallPoint, KernelError, KernelExpr};
use crate::linalg::{self, HermitianMatrix, LinalgError, PsdVerdict};
use crate::series::{PowerSeries, SeriesError};
use crate::Cplx;

/// Relative value gap below which two samples count as colliding.
pub const COLL_EPS: f64 = 1e-7;
/// Colliding points must be at least this far apart.
pub const COLL_SEPARATION: f64 = 1e-4;
pub const MARGIN_TOL: f64 = 1e-9;
/// Max coefficient residual of `h∘b - z` for the inverse to count as valid.
pub const REVERSION_TOL: f64 = 1e-9;
pub const CONSISTENCY_TOL: f64 = 1e-8;
pub const NEAR_ZERO_H: f64 = 1e-6;
const NONCONSTANT_EPS: f64 = 1e-12;
const NEWTON_SEEDS: usize = 4;
const NEWTON_ITERS: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DbrError {
    #[error("NOT_SCHUR_CLASS: sampled max |b| = {0} exceeds 1")]
    NotSchurClass(f64),
    #[error("b is constant")]
    ConstantB,
    #[error("b must be expanded about 0, got center {0}")]
    NotAtOrigin(Cplx),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("WITNESS_INCONSISTENT: q(b(ζ))·ζ differs from b(ζ) - b(0) by {residual:e} at ζ = {zeta}")]
    WitnessInconsistent { residual: f64, zeta: Cplx },
    #[error("NEAR_ZERO_H: sample ζ = {0} is too close to 0")]
    NearZeroH(Cplx),
    #[error("sample set must consist of disk points")]
    NotDiskSamples,
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// de Branges-Rovnyak kernel `(1 - conj(b(w)) b(z)) / (1 - w̄z)` after checking
/// that `b` is nonconstant and passes the sampled `|b| ≤ 1` probe.
pub fn dbr_kernel(b: &PowerSeries) -> Result<KernelExpr, DbrError> {
    if b.is_constant(NONCONSTANT_EPS) {
        return Err(DbrError::ConstantB);
    }
    let m = kernels::schur_probe(b);
    if !(m <= 1.0 + kernels::SCHUR_SLACK) {
        return Err(DbrError::NotSchurClass(m));
    }
    Ok(KernelExpr::Dbr { b: b.clone() })
}

fn disk_samples(pts: &SampleSet) -> Result<Vec<Cplx>, DbrError> {
    pts.disk_points().ok_or(DbrError::NotDiskSamples)
}

fn b_at_origin(b: &PowerSeries) -> Cplx {
    b.eval(Cplx::new(0.0, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Injectivity {
    NotInj,
    InjEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityProbe {
    pub verdict: Injectivity,
    /// A pair `(z1, z2)` with `b(z1) ≈ b(z2)`, when one was found.
    pub collision: Option<(Cplx, Cplx)>,
}

fn collides(v1: Cplx, v2: Cplx) -> bool {
    (v1 - v2).norm() < COLL_EPS * v1.norm().max(1.0)
}

/// Newton's method for `b(q) = target` from `start`, staying inside the
/// disk of radius `r_max`.
fn solve_preimage(b: &PowerSeries, db: &PowerSeries, target: Cplx, start: Cplx, r_max: f64) -> Option<Cplx> {
    let mut q = start;
    for _ in 0..NEWTON_ITERS {
        let r = b.eval(q) - target;
        if collides(b.eval(q), target) && r.norm() < 1e-3 * COLL_EPS * target.norm().max(1.0) {
            break;
        }
        let d = db.eval(q);
        if !(d.norm() > 1e-14) {
            return None;
        }
        q -= r / d;
        if !(q.norm() <= r_max) {
            return None;
        }
    }
    collides(b.eval(q), target).then_some(q)
}

/// Searches for `z1 ≠ z2` with `b(z1) = b(z2)`. Direct pairwise comparison
/// of the samples runs first; then, for each sample, Newton's method seeded
/// at the samples with the nearest values looks for a second preimage. The
/// search stays within the sample set's radius.
pub fn injectivity_probe(b: &PowerSeries, pts: &SampleSet) -> InjectivityProbe {
    let inconclusive = InjectivityProbe {
        verdict: Injectivity::Inconclusive,
        collision: None,
    };
    let Some(zs) = pts.disk_points() else {
        return inconclusive;
    };
    let vals: Vec<Cplx> = zs.iter().map(|&z| b.eval(z)).collect();
    if vals.iter().any(|v| !v.is_finite()) || zs.len() < 2 {
        return inconclusive;
    }
    let found = |z1, z2| InjectivityProbe {
        verdict: Injectivity::NotInj,
        collision: Some((z1, z2)),
    };
    let n = zs.len();
    for i in 0..n {
        for j in i + 1..n {
            if (zs[i] - zs[j]).norm() > COLL_SEPARATION && collides(vals[i], vals[j]) {
                return found(zs[i], zs[j]);
            }
        }
    }
    let r_max = zs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let db = b.derivative();
    for i in 0..n {
        let mut seeds: Vec<usize> = (0..n)
            .filter(|&j| (zs[j] - zs[i]).norm() > COLL_SEPARATION)
            .collect();
        seeds.sort_by(|&x, &y| (vals[x] - vals[i]).norm().total_cmp(&(vals[y] - vals[i]).norm()));
        for &j in seeds.iter().take(NEWTON_SEEDS) {
            if let Some(q) = solve_preimage(b, &db, vals[i], zs[j], r_max) {
                if (q - zs[i]).norm() > COLL_SEPARATION {
                    return found(zs[i], q);
                }
            }
        }
    }
    InjectivityProbe {
        verdict: Injectivity::InjEvidence,
        collision: None,
    }
}

/// Series inverse of `b` plus the largest coefficient of `h∘b - z`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseSeries {
    pub h: PowerSeries,
    pub residual: f64,
}

pub fn compute_h(b: &PowerSeries) -> Result<InverseSeries, DbrError> {
    let h = b.revert()?;
    let id = h.compose(b)?;
    let residual = id
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let want = match k {
                0 => b.center(),
                1 => Cplx::new(1.0, 0.0),
                _ => Cplx::new(0.0, 0.0),
            };
            (c - want).norm()
        })
        .fold(0.0, f64::max);
    Ok(InverseSeries {
        h,
        residual: if residual.is_finite() { residual } else { f64::INFINITY },
    })
}

/// `min_ζ |ζ|·|1 - ā b(ζ)| - |b(ζ) - a|` over the nonzero samples; a
/// nonnegative value is the modulus bound on `q` checked at `z = b(ζ)`.
pub fn schwarz_pick_check(b: &PowerSeries, pts: &SampleSet) -> Result<f64, DbrError> {
    let a = b_at_origin(b);
    let zs = disk_samples(pts)?;
    Ok(zs
        .iter()
        .filter(|z| z.norm() > 1e-12)
        .map(|&z| {
            let bz = b.eval(z);
            z.norm() * (Cplx::new(1.0, 0.0) - a.conj() * bz).norm() - (bz - a).norm()
        })
        .fold(f64::INFINITY, f64::min))
}

/// Candidate for the holomorphic extension of `(z - b(0)) / h(z)` to the disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionWitness {
    pub q: PowerSeries,
}

impl ExtensionWitness {
    pub fn new(q: PowerSeries) -> Result<Self, DbrError> {
        if q.center().norm() != 0.0 {
            return Err(DbrError::NotAtOrigin(q.center()));
        }
        Ok(ExtensionWitness { q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtensionOutcome {
    /// Max `|q(b(ζ))·ζ - (b(ζ) - a)|` over the samples.
    pub consistency: f64,
    /// `min_z |1 - ā z| - |q(z)|` over the disk grid.
    pub margin: f64,
}

/// Disk grid used for the extension margin: the origin plus the
/// `|b| ≤ 1` probe grid (32 radii × 64 angles up to 0.99).
pub fn extension_grid() -> Vec<Cplx> {
    let mut out = vec![Cplx::new(0.0, 0.0)];
    for i in 1..=kernels::PROBE_RADII {
        let r = kernels::PROBE_RMAX * i as f64 / kernels::PROBE_RADII as f64;
        for j in 0..kernels::PROBE_ANGLES {
            out.push(Cplx::from_polar(r, 2.0 * PI * j as f64 / kernels::PROBE_ANGLES as f64));
        }
    }
    out
}

pub fn extension_check(b: &PowerSeries, w: &ExtensionWitness, pts: &SampleSet) -> Result<ExtensionOutcome, DbrError> {
    compute_h(b)?;
    let a = b_at_origin(b);
    let mut consistency: f64 = 0.0;
    for z in disk_samples(pts)? {
        let bz = b.eval(z);
        let r = (w.q.eval(bz) * z - (bz - a)).norm();
        if !(r <= CONSISTENCY_TOL) {
            return Err(DbrError::WitnessInconsistent { residual: r, zeta: z });
        }
        consistency = consistency.max(r);
    }
    let margin = extension_grid()
        .into_iter()
        .map(|z| (Cplx::new(1.0, 0.0) - a.conj() * z).norm() - w.q.eval(z).norm())
        .fold(f64::INFINITY, f64::min);
    Ok(ExtensionOutcome { consistency, margin })
}

/// Gram matrix of `K2 + K0 - K1` where, with `a = b(0)` and `F = 1 - ā b`,
/// `K1 = F(z) conj(F(w)) / (1 - conj(b(w)) b(z))`, `K2 = w̄z·K1` and
/// `K0 = 1 - |a|²`. It equals `(1 - |a|²)` times the CNP defect Gram at base 0.
pub fn decomposition_gram(b: &PowerSeries, pts: &SampleSet) -> Result<HermitianMatrix, DbrError> {
    let a = b_at_origin(b);
    let zero = Cplx::new(0.0, 0.0);
    let f = PowerSeries::constant(zero, Cplx::new(1.0, 0.0), b.order()).sub(&b.scale(a.conj()))?;
    let k1 = KernelExpr::congruence(KernelExpr::pullback(KernelExpr::Szego, b.clone())?, f)?;
    let z = PowerSeries::identity(zero, 1);
    let k2 = KernelExpr::congruence(k1.clone(), z)?;
    let k0 = KernelExpr::constant(1.0 - a.norm_sqr())?;
    let pts: Vec<BallPoint> = disk_samples(pts)?.into_iter().map(BallPoint::disk).collect();
    let rhs = linalg::gram(&KernelExpr::sum(k2, k0)?, &pts)?;
    let lhs = linalg::gram(&k1, &pts)?;
    Ok(rhs.sub(&lhs)?)
}

pub fn decomposition_check(b: &PowerSeries, pts: &SampleSet, tol: f64) -> Result<PsdVerdict, DbrError> {
    Ok(linalg::psd_verdict(&decomposition_gram(b, pts)?, tol))
}

/// Builds `g(z) = (f(z) - f(a)(1 - |a|²)/(1 - ā z)) / h(z)` at `z = b(ζ)`
/// using `h(b(ζ)) = ζ`, and returns the largest residual of
/// `(1 - ā b)(f∘b) = ζ (1 - ā b)(g∘b) + f(a)(1 - |a|²)` over the samples.
pub fn witness_identity_check(b: &PowerSeries, f: &PowerSeries, pts: &SampleSet) -> Result<f64, DbrError> {
    compute_h(b)?;
    if f.center().norm() != 0.0 {
        return Err(DbrError::NotAtOrigin(f.center()));
    }
    let a = b_at_origin(b);
    let one = Cplx::new(1.0, 0.0);
    let c = f.eval(a) * (1.0 - a.norm_sqr());
    let mut worst: f64 = 0.0;
    for zeta in disk_samples(pts)? {
        if zeta.norm() < NEAR_ZERO_H {
            return Err(DbrError::NearZeroH(zeta));
        }
        let z = b.eval(zeta);
        let fz = f.eval(z);
        let g = (fz - c / (one - a.conj() * z)) / zeta;
        let lhs = (one - a.conj() * z) * fz;
        let rhs = zeta * (one - a.conj() * z) * g + c;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Overall {
    PassNecessary,
    PassWithExtension,
    Fail,
}

impl Overall {
    pub fn as_str(self) -> &'static str {
        match self {
            Overall::PassNecessary => "PASS_NECESSARY",
            Overall::PassWithExtension => "PASS_WITH_EXTENSION",
            Overall::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub a: Cplx,
    pub inj: Injectivity,
    pub collision: Option<(Cplx, Cplx)>,
    pub reversion_ok: bool,
    pub reversion_residual: Option<f64>,
    pub schwarz_pick_margin: f64,
    pub extension_supplied: bool,
    pub extension_margin: Option<f64>,
    pub overall: Overall,
    pub notes: Vec<String>,
}

/// Runs every check and combines them: FAIL on a collision, a failed
/// inversion or a negative sampled margin; PASS_WITH_EXTENSION only when a
/// consistent witness satisfies the bound on the disk grid.
pub fn criterion_report(
    b: &PowerSeries,
    witness: Option<&ExtensionWitness>,
    pts: &SampleSet,
) -> Result<CriterionReport, DbrError> {
    if b.center().norm() != 0.0 {
        return Err(DbrError::NotAtOrigin(b.center()));
    }
    let mut notes = Vec::new();
    let a = b_at_origin(b);
    let probe = injectivity_probe(b, pts);
    let (reversion_ok, reversion_residual) = match compute_h(b) {
        Ok(inv) => {
            let ok = inv.residual <= REVERSION_TOL;
            if !ok {
                notes.push(format!(
                    "series inverse residual {:.3e} exceeds {REVERSION_TOL:e}",
                    inv.residual
                ));
            }
            (ok, Some(inv.residual))
        }
        Err(DbrError::Series(e @ SeriesError::NonInvertible(_))) => {
            notes.push(format!("{e}; b'(0) ≈ 0 rules out a holomorphic inverse"));
            (false, None)
        }
        Err(e) => return Err(e),
    };
    let sp = schwarz_pick_check(b, pts)?;
    if probe.verdict == Injectivity::NotInj {
        if let Some((z1, z2)) = probe.collision {
            notes.push(format!("b({z1}) ≈ b({z2}): b is not injective"));
        }
    }
    let failed = probe.verdict == Injectivity::NotInj || !reversion_ok || sp < -MARGIN_TOL;
    let mut extension_margin = None;
    if let Some(w) = witness {
        if failed {
            notes.push("extension witness not checked: a necessary condition already fails".into());
        } else {
            let out = extension_check(b, w, pts)?;
            if out.margin < -MARGIN_TOL {
                notes.push(format!(
                    "witness is consistent but exceeds |1 - ā z| by {:.3e}; the extension of (z - a)/h is unique, so this points to the bound failing off b(𝔻)",
                    -out.margin
                ));
            }
            extension_margin = Some(out.margin);
        }
    }
    if probe.verdict == Injectivity::Inconclusive {
        notes.push("injectivity probe inconclusive".into());
    }
    let overall = if failed {
        Overall::Fail
    } else if extension_margin.is_some_and(|m| m >= -MARGIN_TOL) {
        Overall::PassWithExtension
    } else {
        Overall::PassNecessary
    };
    if overall == Overall::PassNecessary {
        notes.push("necessary conditions hold on the samples; CNP is not established without a valid extension witness".into());
    }
    Ok(CriterionReport {
        a,
        inj: probe.verdict,
        collision: probe.collision,
        reversion_ok,
        reversion_residual,
        schwarz_pick_margin: sp,
        extension_supplied: witness.is_some(),
        extension_margin,
        overall,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnp::{self, DEFAULT_SEED};
    use crate::families::BFamily;
    use crate::linalg::PsdStatus;
    use crate::pickinterp::blaschke_product;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    fn defaults() -> SampleSet {
        SampleSet::default_disk(DEFAULT_SEED)
    }

    fn zsq() -> PowerSeries {
        PowerSeries::from_real(&[0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn kernel_construction() {
        let k = dbr_kernel(&PowerSeries::from_real(&[0.0, 1.0]).unwrap()).unwrap();
        assert!((k.eval_disk(c(0.4, 0.1), c(-0.3, 0.5)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let k = dbr_kernel(&PowerSeries::from_real(&[0.0, 0.5]).unwrap()).unwrap();
        assert!((k.eval_disk(c(0.5, 0.0), c(0.5, 0.0)).unwrap() - c(1.25, 0.0)).norm() < 1e-15);
        assert!(matches!(
            dbr_kernel(&PowerSeries::from_real(&[0.0, 1.2 / 0.99]).unwrap()),
            Err(DbrError::NotSchurClass(m)) if (m - 1.2).abs() < 1e-12
        ));
        assert!(matches!(dbr_kernel(&PowerSeries::from_real(&[0.5, 0.0]).unwrap()), Err(DbrError::ConstantB)));
    }

    #[test]
    fn injectivity_examples() {
        let p = injectivity_probe(&zsq(), &defaults());
        assert_eq!(p.verdict, Injectivity::NotInj);
        let (z1, z2) = p.collision.unwrap();
        assert!((z1 + z2).norm() < 1e-12);

        let affine = BFamily::Affine { a: c(1.0, 0.0), b: c(3.0, 0.0) }.series(64).unwrap();
        assert_eq!(injectivity_probe(&affine, &defaults()).verdict, Injectivity::InjEvidence);

        let one = SampleSet::explicit_disk(&[c(0.5, 0.0)]).unwrap();
        assert_eq!(injectivity_probe(&affine, &one).verdict, Injectivity::Inconclusive);
    }

    #[test]
    fn injectivity_refines_near_critical_point() {
        // 2-to-1 on the disk, but no two grid points share a value exactly
        let b = blaschke_product(&[c(0.0, 0.0), c(0.5, 0.0)], 64);
        let pts = defaults();
        let vals: Vec<Cplx> = pts.disk_points().unwrap().iter().map(|&z| b.eval(z)).collect();
        let direct = (0..vals.len())
            .any(|i| (i + 1..vals.len()).any(|j| collides(vals[i], vals[j])));
        assert!(!direct);
        let p = injectivity_probe(&b, &pts);
        assert_eq!(p.verdict, Injectivity::NotInj);
        let (z1, z2) = p.collision.unwrap();
        assert!((b.eval(z1) - b.eval(z2)).norm() < COLL_EPS);
        assert!((z1 - z2).norm() > COLL_SEPARATION && z2.norm() < 1.0);
    }

    #[test]
    fn injective_maps_are_not_flagged() {
        let pts = defaults();
        for f in [
            BFamily::MoebiusOver { a: c(-1.0, 0.0), b: c(-2.0, 0.0) },
            BFamily::Blaschke { zeros: vec![c(0.5, 0.3)] },
            BFamily::ScaledIdentity { r: 1.5 },
        ] {
            let p = injectivity_probe(&f.series(64).unwrap(), &pts);
            assert_eq!(p.verdict, Injectivity::InjEvidence, "{}", f.label());
        }
    }

    #[test]
    fn compute_h_closed_forms() {
        let (a, bb) = (c(0.3, 0.4), c(2.0, -1.0));
        let b = BFamily::Affine { a, b: bb }.series(64).unwrap();
        let inv = compute_h(&b).unwrap();
        assert!((inv.h.center() - a / bb).norm() < 1e-15);
        // h(w) = Bw - A expanded about a/B: coefficients [0, B]
        assert!(inv.h.coeff(0).norm() < 1e-15);
        assert!((inv.h.coeff(1) - bb).norm() < 1e-14);
        assert!(inv.h.coeffs()[2..].iter().all(|x| x.norm() < 1e-14));

        let fam = BFamily::MoebiusOver { a: c(1.5, 0.0), b: c(3.0, 0.5) };
        let inv = compute_h(&fam.series(32).unwrap()).unwrap();
        for w in [c(0.1, 0.0), c(-0.2, 0.3), c(0.0, -0.35)] {
            assert!((inv.h.eval(w) - fam.inverse(w).unwrap()).norm() < 1e-10, "{w}");
        }

        let inv = compute_h(&PowerSeries::from_real(&[0.0, 1.0, 1.0, 0.0, 0.0]).unwrap()).unwrap();
        let want = [0.0, 1.0, -1.0, 2.0, -5.0];
        for (k, w) in want.iter().enumerate() {
            assert!((inv.h.coeff(k) - c(*w, 0.0)).norm() < 1e-12);
        }
        assert!(matches!(compute_h(&zsq()), Err(DbrError::Series(SeriesError::NonInvertible(_)))));
    }

    #[test]
    fn schwarz_pick_examples() {
        let pts = defaults();
        let min_r = pts.disk_points().unwrap().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        let m = schwarz_pick_check(&PowerSeries::from_real(&[0.0, 0.5]).unwrap(), &pts).unwrap();
        assert!((m - min_r / 2.0).abs() < 1e-15);
        // z²: |ζ| - |ζ|² is minimized at the largest or smallest radius
        let m = schwarz_pick_check(&zsq(), &pts).unwrap();
        let want = pts
            .disk_points()
            .unwrap()
            .iter()
            .map(|z| z.norm() - z.norm_sqr())
            .fold(f64::INFINITY, f64::min);
        assert!((m - want).abs() < 1e-15 && m > 0.0);
    }

    #[test]
    fn degree_two_blaschke_fails_overall() {
        let b = blaschke_product(&[c(0.0, 0.0), c(0.5, 0.0)], 64);
        let r = criterion_report(&b, None, &defaults()).unwrap();
        assert_eq!(r.inj, Injectivity::NotInj);
        assert_eq!(r.overall, Overall::Fail);
    }

    #[test]
    fn extension_examples() {
        let pts = defaults();
        let fam = BFamily::Affine { a: c(0.5, 0.0), b: c(2.0, 0.0) };
        let b = fam.series(64).unwrap();
        let w = ExtensionWitness::new(fam.witness(64).unwrap()).unwrap();
        let out = extension_check(&b, &w, &pts).unwrap();
        let a = 0.25;
        // min over the grid of |1 - a z| - 1/2 is at z = 0.99
        assert!((out.margin - ((1.0 - a * 0.99) - 0.5)).abs() < 1e-12);
        assert!(out.margin >= (1.0 - a) - 0.5);

        let id = PowerSeries::from_real(&[0.0, 1.0]).unwrap();
        let w = ExtensionWitness::new(PowerSeries::from_real(&[1.0]).unwrap()).unwrap();
        let out = extension_check(&id, &w, &pts).unwrap();
        assert!(out.margin.abs() < 1e-15);
        let r = criterion_report(&id, Some(&w), &pts).unwrap();
        assert_eq!(r.overall, Overall::PassWithExtension);

        let doubled = ExtensionWitness::new(fam.witness(64).unwrap().scale(c(2.0, 0.0))).unwrap();
        assert!(matches!(
            extension_check(&b, &doubled, &pts),
            Err(DbrError::WitnessInconsistent { .. })
        ));
    }

    #[test]
    fn decomposition_examples() {
        let pts = defaults();
        let v = decomposition_check(&PowerSeries::from_real(&[0.0, 0.5]).unwrap(), &pts, 1e-9).unwrap();
        assert_eq!(v.status, PsdStatus::Psd);
        let two = SampleSet::explicit_disk(&[c(0.5, 0.0), c(-0.5, 0.0)]).unwrap();
        let v = decomposition_check(&zsq(), &two, 1e-9).unwrap();
        assert_eq!(v.status, PsdStatus::NotPsd);
        // F(0) = 1 here, so the matrix is the defect Gram itself
        assert!((v.min_eig - (0.2 - 1.0 / 3.0)).abs() < 1e-12);
        let bl = blaschke_product(&[c(-0.2, 0.4)], 64);
        let v = decomposition_check(&bl, &pts, 1e-9).unwrap();
        assert_eq!(v.status, PsdStatus::Psd);
        assert!(v.min_eig >= -1e-9);
    }

    #[test]
    fn decomposition_is_scaled_defect() {
        let fam = BFamily::Affine { a: c(0.2, -0.3), b: c(0.0, 2.0) };
        let b = fam.series(64).unwrap();
        let pts = SampleSet::radial_grid(3, 5, 0.8).unwrap();
        let dec = decomposition_gram(&b, &pts).unwrap();
        let (def, _) = cnp::defect_gram(&dbr_kernel(&b).unwrap(), &BallPoint::disk(c(0.0, 0.0)), &pts).unwrap();
        let f0 = 1.0 - b.coeff(0).norm_sqr();
        for (x, y) in dec.entries().iter().zip(def.entries()) {
            assert!((x - y * f0).norm() < 1e-13);
        }
    }

    #[test]
    fn witness_identity_examples() {
        let pts = defaults();
        let one = PowerSeries::from_real(&[1.0]).unwrap();
        let z = PowerSeries::from_real(&[0.0, 1.0]).unwrap();
        let half = PowerSeries::from_real(&[0.0, 0.5]).unwrap();
        let fam = BFamily::Affine { a: c(0.3, 0.2), b: c(-1.5, 0.5) };
        let b = fam.series(64).unwrap();
        assert!(witness_identity_check(&b, &one, &pts).unwrap() < 1e-10);
        assert!(witness_identity_check(&half, &z, &pts).unwrap() < 1e-10);
        let a = b.coeff(0);
        let ks = PowerSeries::geometric(a.conj(), 64);
        assert!(witness_identity_check(&b, &ks, &pts).unwrap() < 1e-10);

        let with_zero = SampleSet::explicit_disk(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(
            witness_identity_check(&b, &one, &with_zero),
            Err(DbrError::NearZeroH(_))
        ));
        assert!(matches!(witness_identity_check(&zsq(), &one, &pts), Err(DbrError::Series(_))));
    }

    #[test]
    fn report_for_power_two() {
        let r = criterion_report(&zsq(), None, &defaults()).unwrap();
        assert_eq!(r.overall, Overall::Fail);
        assert!(!r.reversion_ok);
        assert!(r.schwarz_pick_margin > 0.0);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["overall"], "FAIL");
        assert_eq!(v["inj"], "NOT_INJ");
    }

    #[test]
    fn report_without_witness_is_necessary_only() {
        let b = PowerSeries::from_real(&[0.0, 0.5]).unwrap();
        let r = criterion_report(&b, None, &defaults()).unwrap();
        assert_eq!(r.overall, Overall::PassNecessary);
        assert!(!r.extension_supplied && r.extension_margin.is_none());
    }
}
