//! Evaluable kernel expressions.
//!
//! Builtins cover the Szegő kernel `1/(1 - w̄z)`, the Drury-Arveson kernel on
//! the unit ball, truncated weighted Hardy kernels and the de Branges-Rovnyak
//! kernel `(1 - conj(b(w)) b(z)) / (1 - w̄z)`. Combinators build sums,
//! pull-backs along a power series, rank-one congruences `F(z) conj(F(w)) K`
//! and the normalized CNP defect `1 - K(z,α)K(α,w) / (K(α,α)K(z,w))`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::PowerSeries;
use crate::Cplx;

/// Denominator moduli below this are treated as singular.
pub const DOM_EPS: f64 = 1e-12;
/// Kernel values below this modulus count as vanishing in defect kernels.
pub const DEFECT_EPS: f64 = 1e-12;
/// Slack allowed above 1 by the sampled `|b| ≤ 1` probe.
pub const SCHUR_SLACK: f64 = 1e-9;

pub const PROBE_RADII: usize = 32;
pub const PROBE_ANGLES: usize = 64;
pub const PROBE_RMAX: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("DOMAIN_VIOLATION: {0}")]
    DomainViolation(String),
    #[error("NEAR_SINGULAR: denominator modulus {0:e} below {DOM_EPS:e}")]
    NearSingular(f64),
    #[error("RANGE_VIOLATION: map value {0} leaves the inner kernel's domain")]
    RangeViolation(Cplx),
    #[error("VANISHING_KERNEL: kernel modulus {0:e} below {DEFECT_EPS:e}")]
    VanishingKernel(f64),
    #[error("DOMAIN_MISMATCH: dimensions {0:?} and {1:?} differ")]
    DomainMismatch(Option<usize>, Option<usize>),
    #[error("NOT_SCHUR_CLASS: sampled max |b| = {0} exceeds 1")]
    NotSchurClass(f64),
    #[error("invalid kernel parameters: {0}")]
    InvalidParameter(String),
}

/// A point of the open unit ball of `C^d`; disk points have `d = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BallPoint {
    pub coords: Vec<Cplx>,
}

impl BallPoint {
    pub fn new(coords: Vec<Cplx>) -> Self {
        BallPoint { coords }
    }

    pub fn disk(z: Cplx) -> Self {
        BallPoint { coords: vec![z] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn as_disk(&self) -> Option<Cplx> {
        match self.coords.as_slice() {
            [z] => Some(*z),
            _ => None,
        }
    }

    /// `⟨self, other⟩ = Σ self_i conj(other_i)`.
    pub fn inner(&self, other: &BallPoint) -> Cplx {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn dist(&self, other: &BallPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl From<Cplx> for BallPoint {
    fn from(z: Cplx) -> Self {
        BallPoint::disk(z)
    }
}

impl fmt::Display for BallPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_disk() {
            Some(z) => write!(f, "{z}"),
            None => {
                write!(f, "(")?;
                for (i, c) in self.coords.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelExpr {
    Szego,
    DruryArveson {
        dim: usize,
    },
    /// `Σ (w̄z)^n / w_n`, truncated at the length of `weights`.
    WeightedHardy {
        weights: Vec<f64>,
    },
    Dbr {
        b: PowerSeries,
    },
    Constant {
        c: f64,
    },
    Sum {
        left: Box<KernelExpr>,
        right: Box<KernelExpr>,
    },
    Pullback {
        inner: Box<KernelExpr>,
        map: PowerSeries,
    },
    Congruence {
        inner: Box<KernelExpr>,
        factor: PowerSeries,
    },
    NormalizedDefect {
        inner: Box<KernelExpr>,
        base: BallPoint,
    },
}

/// `w_n² ≥ w_{n-1} w_{n+1}` for every stored interior index.
pub fn is_logconcave(weights: &[f64]) -> bool {
    weights
        .windows(3)
        .all(|w| w[1] * w[1] >= w[0] * w[2] * (1.0 - 1e-14))
}

/// Sampled sup of `|b|` over a polar grid of the disk (plus the origin).
pub fn schur_probe(b: &PowerSeries) -> f64 {
    let mut max = b.eval(Cplx::new(0.0, 0.0)).norm();
    for i in 1..=PROBE_RADII {
        let r = PROBE_RMAX * i as f64 / PROBE_RADII as f64;
        for j in 0..PROBE_ANGLES {
            let theta = 2.0 * PI * j as f64 / PROBE_ANGLES as f64;
            let v = b.eval(Cplx::from_polar(r, theta)).norm();
            if !v.is_finite() {
                return f64::INFINITY;
            }
            max = max.max(v);
        }
    }
    max
}

fn merge_dims(a: Option<usize>, b: Option<usize>) -> Result<Option<usize>, KernelError> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(KernelError::DomainMismatch(a, b)),
        (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
        (None, None) => Ok(None),
    }
}

fn disk_point(p: &BallPoint) -> Result<Cplx, KernelError> {
    let z = p
        .as_disk()
        .ok_or_else(|| KernelError::DomainViolation(format!("expected a disk point, got dimension {}", p.dim())))?;
    if !(z.norm() < 1.0) {
        return Err(KernelError::DomainViolation(format!("{z} is outside the open unit disk")));
    }
    Ok(z)
}

fn szego(z: Cplx, w: Cplx) -> Result<Cplx, KernelError> {
    let den = Cplx::new(1.0, 0.0) - w.conj() * z;
    if den.norm() < DOM_EPS {
        return Err(KernelError::NearSingular(den.norm()));
    }
    Ok(den.inv())
}

impl KernelExpr {
    pub fn szego() -> Self {
        KernelExpr::Szego
    }

    pub fn drury_arveson(dim: usize) -> Result<Self, KernelError> {
        if dim == 0 {
            return Err(KernelError::InvalidParameter("Drury-Arveson dimension must be ≥ 1".into()));
        }
        Ok(KernelExpr::DruryArveson { dim })
    }

    pub fn weighted_hardy(weights: Vec<f64>) -> Result<Self, KernelError> {
        check_weights(&weights)?;
        Ok(KernelExpr::WeightedHardy { weights })
    }

    pub fn constant(c: f64) -> Result<Self, KernelError> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(KernelError::InvalidParameter(format!("constant kernel needs c ≥ 0, got {c}")));
        }
        Ok(KernelExpr::Constant { c })
    }

    pub fn sum(left: KernelExpr, right: KernelExpr) -> Result<Self, KernelError> {
        merge_dims(left.domain_dim(), right.domain_dim())?;
        Ok(KernelExpr::Sum {
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    pub fn pullback(inner: KernelExpr, map: PowerSeries) -> Result<Self, KernelError> {
        merge_dims(inner.domain_dim(), Some(1))?;
        Ok(KernelExpr::Pullback {
            inner: Box::new(inner),
            map,
        })
    }

    pub fn congruence(inner: KernelExpr, factor: PowerSeries) -> Result<Self, KernelError> {
        merge_dims(inner.domain_dim(), Some(1))?;
        Ok(KernelExpr::Congruence {
            inner: Box::new(inner),
            factor,
        })
    }

    /// Normalized defect at `base`. `K(base, base)` must be real and positive.
    pub fn cnp_defect(inner: KernelExpr, base: BallPoint) -> Result<Self, KernelError> {
        merge_dims(inner.domain_dim(), Some(base.dim()))?;
        let kbb = inner.eval(&base, &base)?;
        if !(kbb.re > DEFECT_EPS) || kbb.im.abs() > 1e-10 * kbb.norm() {
            return Err(KernelError::VanishingKernel(kbb.norm()));
        }
        Ok(KernelExpr::NormalizedDefect {
            inner: Box::new(inner),
            base,
        })
    }

    /// Dimension of the evaluation domain; `None` for dimension-free nodes.
    pub fn domain_dim(&self) -> Option<usize> {
        match self {
            KernelExpr::Szego
            | KernelExpr::WeightedHardy { .. }
            | KernelExpr::Dbr { .. }
            | KernelExpr::Pullback { .. }
            | KernelExpr::Congruence { .. } => Some(1),
            KernelExpr::DruryArveson { dim } => Some(*dim),
            KernelExpr::Constant { .. } => None,
            KernelExpr::Sum { left, right } => left.domain_dim().or(right.domain_dim()),
            KernelExpr::NormalizedDefect { inner, base } => inner.domain_dim().or(Some(base.dim())),
        }
    }

    pub fn logconcave(&self) -> Option<bool> {
        match self {
            KernelExpr::WeightedHardy { weights } => Some(is_logconcave(weights)),
            _ => None,
        }
    }

    /// Recursively checks parameters, dimensions and the `|b| ≤ 1` probe of
    /// every de Branges-Rovnyak node.
    pub fn validate(&self) -> Result<(), KernelError> {
        match self {
            KernelExpr::Szego => Ok(()),
            KernelExpr::DruryArveson { dim } => {
                if *dim == 0 {
                    return Err(KernelError::InvalidParameter("Drury-Arveson dimension must be ≥ 1".into()));
                }
                Ok(())
            }
            KernelExpr::WeightedHardy { weights } => check_weights(weights),
            KernelExpr::Dbr { b } => {
                let m = schur_probe(b);
                if !(m <= 1.0 + SCHUR_SLACK) {
                    return Err(KernelError::NotSchurClass(m));
                }
                Ok(())
            }
            KernelExpr::Constant { c } => {
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(KernelError::InvalidParameter(format!("constant kernel needs c ≥ 0, got {c}")));
                }
                Ok(())
            }
            KernelExpr::Sum { left, right } => {
                left.validate()?;
                right.validate()?;
                merge_dims(left.domain_dim(), right.domain_dim()).map(|_| ())
            }
            KernelExpr::Pullback { inner, .. } | KernelExpr::Congruence { inner, .. } => {
                inner.validate()?;
                merge_dims(inner.domain_dim(), Some(1)).map(|_| ())
            }
            KernelExpr::NormalizedDefect { inner, base } => {
                inner.validate()?;
                merge_dims(inner.domain_dim(), Some(base.dim())).map(|_| ())
            }
        }
    }

    /// `K(z, w)`, i.e. the value at `z` of the kernel function centered at `w`.
    pub fn eval(&self, z: &BallPoint, w: &BallPoint) -> Result<Cplx, KernelError> {
        match self {
            KernelExpr::Szego => szego(disk_point(z)?, disk_point(w)?),
            KernelExpr::DruryArveson { dim } => {
                for p in [z, w] {
                    if p.dim() != *dim {
                        return Err(KernelError::DomainViolation(format!(
                            "point of dimension {} for a dimension-{dim} ball kernel",
                            p.dim()
                        )));
                    }
                    if !(p.norm_sqr() < 1.0) {
                        return Err(KernelError::DomainViolation(format!("{p} is outside the open unit ball")));
                    }
                }
                let den = Cplx::new(1.0, 0.0) - z.inner(w);
                if den.norm() < DOM_EPS {
                    return Err(KernelError::NearSingular(den.norm()));
                }
                Ok(den.inv())
            }
            KernelExpr::WeightedHardy { weights } => {
                let t = disk_point(z)? * disk_point(w)?.conj();
                let mut p = Cplx::new(1.0, 0.0);
                let mut acc = Cplx::new(0.0, 0.0);
                for wn in weights {
                    acc += p / *wn;
                    p *= t;
                }
                Ok(acc)
            }
            KernelExpr::Dbr { b } => {
                let (zd, wd) = (disk_point(z)?, disk_point(w)?);
                let den = Cplx::new(1.0, 0.0) - wd.conj() * zd;
                if den.norm() < DOM_EPS {
                    return Err(KernelError::NearSingular(den.norm()));
                }
                let num = Cplx::new(1.0, 0.0) - b.eval(wd).conj() * b.eval(zd);
                Ok(num / den)
            }
            KernelExpr::Constant { c } => Ok(Cplx::new(*c, 0.0)),
            KernelExpr::Sum { left, right } => Ok(left.eval(z, w)? + right.eval(z, w)?),
            KernelExpr::Pullback { inner, map } => {
                let fz = map.eval(disk_point(z)?);
                let fw = map.eval(disk_point(w)?);
                inner
                    .eval(&BallPoint::disk(fz), &BallPoint::disk(fw))
                    .map_err(|e| match e {
                        KernelError::DomainViolation(_) => {
                            let bad = if fz.is_finite() && fz.norm() < 1.0 { fw } else { fz };
                            KernelError::RangeViolation(bad)
                        }
                        other => other,
                    })
            }
            KernelExpr::Congruence { inner, factor } => {
                let fz = factor.eval(disk_point(z)?);
                let fw = factor.eval(disk_point(w)?);
                Ok(fz * fw.conj() * inner.eval(z, w)?)
            }
            KernelExpr::NormalizedDefect { inner, base } => {
                let kzb = inner.eval(z, base)?;
                let kbw = inner.eval(base, w)?;
                let kbb = inner.eval(base, base)?;
                let kzw = inner.eval(z, w)?;
                for m in [kzb.norm(), kbw.norm(), kzw.norm(), kbb.norm()] {
                    if m < DEFECT_EPS {
                        return Err(KernelError::VanishingKernel(m));
                    }
                }
                Ok(Cplx::new(1.0, 0.0) - kzb * kbw / (kbb * kzw))
            }
        }
    }

    /// Disk-point shorthand for [`KernelExpr::eval`].
    pub fn eval_disk(&self, z: Cplx, w: Cplx) -> Result<Cplx, KernelError> {
        self.eval(&BallPoint::disk(z), &BallPoint::disk(w))
    }

    /// Short human-readable tag used in matrix assembly metadata.
    pub fn label(&self) -> String {
        match self {
            KernelExpr::Szego => "szego".into(),
            KernelExpr::DruryArveson { dim } => format!("drury_arveson(d={dim})"),
            KernelExpr::WeightedHardy { weights } => format!("weighted_hardy(n={})", weights.len()),
            KernelExpr::Dbr { b } => format!("dbr(b(0)={}, N={})", b.eval(Cplx::new(0.0, 0.0)), b.order()),
            KernelExpr::Constant { c } => format!("constant({c})"),
            KernelExpr::Sum { left, right } => format!("sum({}, {})", left.label(), right.label()),
            KernelExpr::Pullback { inner, .. } => format!("pullback({})", inner.label()),
            KernelExpr::Congruence { inner, .. } => format!("congruence({})", inner.label()),
            KernelExpr::NormalizedDefect { inner, base } => format!("defect({}, base={base})", inner.label()),
        }
    }
}

fn check_weights(weights: &[f64]) -> Result<(), KernelError> {
    if weights.is_empty() {
        return Err(KernelError::InvalidParameter("weighted Hardy kernel needs at least one weight".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(KernelError::InvalidParameter(format!("weights must be strictly positive, found {w}")));
    }
    Ok(())
}
