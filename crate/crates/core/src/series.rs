//! Truncated complex power series.
//!
//! A [`PowerSeries`] stores the coefficients of `Σ c_n (z - center)^n` for
//! `n = 0..=N`. Every operation truncates its result; nothing here tracks a
//! radius of convergence, so callers only evaluate at points they know to be
//! well inside the region where the truncation is accurate.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Cplx;

/// Default truncation degree (inclusive).
pub const DEFAULT_ORDER: usize = 64;
/// `|a1|` at or below this makes a series non-invertible.
pub const REV_EPS: f64 = 1e-10;
/// Coefficients at or below this modulus count as zero when detecting the
/// order of vanishing in [`PowerSeries::div_factor`].
pub const DIV_EPS: f64 = 1e-12;

const CENTER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("CENTER_MISMATCH: series centers differ ({left} vs {right})")]
    CenterMismatch { left: Cplx, right: Cplx },
    #[error("COMPOSITION_CENTER: inner constant term {inner} does not match outer center {outer}")]
    CompositionCenter { inner: Cplx, outer: Cplx },
    #[error("NON_INVERTIBLE: linear coefficient modulus {0:e} is at or below the reversion threshold")]
    NonInvertible(f64),
    #[error("DIVISION_ORDER: denominator vanishes to order {den} but numerator only to order {num}")]
    DivisionOrder { num: usize, den: usize },
    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),
    #[error("a power series needs at least one coefficient")]
    Empty,
}

/// Truncated power series `Σ_{n=0}^{N} coeffs[n] (z - center)^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesLiteral", into = "SeriesLiteral")]
pub struct PowerSeries {
    center: Cplx,
    coeffs: Vec<Cplx>,
}

/// Wire form of a series: a center plus a list of `[re, im]` coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesLiteral {
    #[serde(default)]
    pub center: Cplx,
    pub coeffs: Vec<Cplx>,
}

impl TryFrom<SeriesLiteral> for PowerSeries {
    type Error = SeriesError;

    fn try_from(lit: SeriesLiteral) -> Result<Self, Self::Error> {
        PowerSeries::new(lit.center, lit.coeffs)
    }
}

impl From<PowerSeries> for SeriesLiteral {
    fn from(s: PowerSeries) -> Self {
        SeriesLiteral {
            center: s.center,
            coeffs: s.coeffs,
        }
    }
}

impl PowerSeries {
    pub fn new(center: Cplx, coeffs: Vec<Cplx>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        if !center.is_finite() {
            return Err(SeriesError::NonFinite(0));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(SeriesError::NonFinite(i));
        }
        Ok(PowerSeries { center, coeffs })
    }

    /// Series centered at 0.
    pub fn at_origin(coeffs: Vec<Cplx>) -> Result<Self, SeriesError> {
        Self::new(Cplx::new(0.0, 0.0), coeffs)
    }

    /// Builds a series from real coefficients, centered at 0.
    pub fn from_real(coeffs: &[f64]) -> Result<Self, SeriesError> {
        Self::at_origin(coeffs.iter().map(|&c| Cplx::new(c, 0.0)).collect())
    }

    pub fn constant(center: Cplx, value: Cplx, order: usize) -> Self {
        let mut coeffs = vec![Cplx::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        PowerSeries { center, coeffs }
    }

    /// The function `z` expanded about `center`, i.e. `center + (z - center)`.
    pub fn identity(center: Cplx, order: usize) -> Self {
        let mut coeffs = vec![Cplx::new(0.0, 0.0); order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = Cplx::new(1.0, 0.0);
        }
        PowerSeries { center, coeffs }
    }

    /// Geometric series `1 / (1 - ratio·z)` about 0.
    pub fn geometric(ratio: Cplx, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut p = Cplx::new(1.0, 0.0);
        for _ in 0..=order {
            coeffs.push(p);
            p *= ratio;
        }
        PowerSeries {
            center: Cplx::new(0.0, 0.0),
            coeffs,
        }
    }

    pub fn center(&self) -> Cplx {
        self.center
    }

    pub fn coeffs(&self) -> &[Cplx] {
        &self.coeffs
    }

    /// Truncation degree `N` (inclusive).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Cplx {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// True when all non-constant coefficients are below `eps` in modulus.
    pub fn is_constant(&self, eps: f64) -> bool {
        self.coeffs[1..].iter().all(|c| c.norm() <= eps)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Cplx::new(0.0, 0.0));
        PowerSeries {
            center: self.center,
            coeffs,
        }
    }

    /// Horner evaluation at `z`. Overflow shows up as a non-finite result.
    pub fn eval(&self, z: Cplx) -> Cplx {
        let u = z - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Cplx::new(0.0, 0.0), |acc, &c| acc * u + c)
    }

    pub fn scale(&self, k: Cplx) -> Self {
        PowerSeries {
            center: self.center,
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut coeffs: Vec<Cplx> = (1..=n).map(|k| self.coeffs[k] * k as f64).collect();
        if coeffs.is_empty() {
            coeffs.push(Cplx::new(0.0, 0.0));
        }
        PowerSeries {
            center: self.center,
            coeffs,
        }
    }

    fn check_center(&self, other: &Self) -> Result<(), SeriesError> {
        if (self.center - other.center).norm() > CENTER_TOL * (1.0 + self.center.norm()) {
            return Err(SeriesError::CenterMismatch {
                left: self.center,
                right: other.center,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.arith(other, ArithOp::Add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.arith(other, ArithOp::Mul)
    }

    /// Coefficientwise add/sub or truncated Cauchy product; the result has
    /// order `min(N_a, N_b)`.
    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self, SeriesError> {
        self.check_center(other)?;
        let n = self.order().min(other.order());
        let coeffs = match op {
            ArithOp::Add => (0..=n).map(|k| self.coeffs[k] + other.coeffs[k]).collect(),
            ArithOp::Sub => (0..=n).map(|k| self.coeffs[k] - other.coeffs[k]).collect(),
            ArithOp::Mul => mul_trunc(&self.coeffs, &other.coeffs, n),
        };
        Ok(PowerSeries {
            center: self.center,
            coeffs,
        })
    }

    /// `outer ∘ inner`, centered at `inner.center`, truncated to
    /// `min(N_outer, N_inner)`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let c0 = inner.coeffs[0];
        if (c0 - self.center).norm() > CENTER_TOL * (1.0 + self.center.norm()) {
            return Err(SeriesError::CompositionCenter {
                inner: c0,
                outer: self.center,
            });
        }
        let n = self.order().min(inner.order());
        let mut tail = inner.coeffs[..=n].to_vec();
        tail[0] = Cplx::new(0.0, 0.0);
        Ok(PowerSeries {
            center: inner.center,
            coeffs: compose_trunc(&self.coeffs, &tail, n),
        })
    }

    /// Compositional inverse: for `s = a0 + a1 (z - c) + …` returns `h`
    /// centered at `a0` with `h(s(z)) = z + O((z - c)^{N+1})`.
    ///
    /// Uses Newton's iteration `g ← g - (t∘g - v) / (t'∘g)` on the shifted
    /// series `t = s - a0`, doubling the number of correct coefficients per
    /// step.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        let a1 = self.coeff(1);
        if self.order() < 1 || a1.norm() <= REV_EPS {
            return Err(SeriesError::NonInvertible(a1.norm()));
        }
        let n = self.order();
        let zero = Cplx::new(0.0, 0.0);
        let mut t = self.coeffs.clone();
        t[0] = zero;
        let dt: Vec<Cplx> = (1..=n).map(|k| t[k] * k as f64).collect();

        let mut g = vec![zero; n + 1];
        g[1] = a1.inv();
        let mut prec = 2;
        // One extra pass at full precision mops up rounding from the last
        // doubling step.
        let mut polish = 1;
        loop {
            let done = prec > n;
            let m = prec.min(n + 1) - 1;
            let gm = &g[..=m];
            let tg = compose_trunc(&t[..=m], gm, m);
            let dtg = compose_trunc(&dt[..m.min(dt.len() - 1) + 1], gm, m);
            let mut resid = tg;
            if m >= 1 {
                resid[1] -= Cplx::new(1.0, 0.0);
            }
            let corr = mul_trunc(&resid, &recip_trunc(&dtg, m), m);
            for k in 0..=m {
                g[k] -= corr[k];
            }
            g[0] = zero;
            if done {
                if polish == 0 {
                    break;
                }
                polish -= 1;
            }
            prec *= 2;
        }
        for (k, c) in g.iter().enumerate() {
            if !c.is_finite() {
                return Err(SeriesError::NonFinite(k));
            }
        }
        g[0] = self.center;
        Ok(PowerSeries {
            center: self.coeffs[0],
            coeffs: g,
        })
    }

    /// Formal quotient `num / den` after cancelling the common zero at the
    /// center. The result has order `min(N_num, N_den) - ord(den)`.
    pub fn div_factor(&self, den: &Self) -> Result<Self, SeriesError> {
        self.check_center(den)?;
        let n = self.order().min(den.order());
        let vanishing = |s: &[Cplx]| s.iter().position(|c| c.norm() > DIV_EPS);
        let d = match vanishing(&den.coeffs[..=n]) {
            Some(d) => d,
            None => {
                return Err(SeriesError::DivisionOrder {
                    num: vanishing(&self.coeffs[..=n]).unwrap_or(n + 1),
                    den: n + 1,
                })
            }
        };
        if let Some(k) = vanishing(&self.coeffs[..=n]) {
            if k < d {
                return Err(SeriesError::DivisionOrder { num: k, den: d });
            }
        }
        let m = n - d;
        let num = &self.coeffs[d..=n];
        let inv = recip_trunc(&den.coeffs[d..=n], m);
        Ok(PowerSeries {
            center: self.center,
            coeffs: mul_trunc(num, &inv, m),
        })
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn recip(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0].norm() <= DIV_EPS {
            return Err(SeriesError::DivisionOrder { num: 0, den: 1 });
        }
        Ok(PowerSeries {
            center: self.center,
            coeffs: recip_trunc(&self.coeffs, self.order()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})·u")?,
                _ => write!(f, "({c})·u^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "  [u = z - ({})]", self.center)
    }
}

/// Cauchy product of `a` and `b` truncated to degree `n`.
pub(crate) fn mul_trunc(a: &[Cplx], b: &[Cplx], n: usize) -> Vec<Cplx> {
    let mut out = vec![Cplx::new(0.0, 0.0); n + 1];
    for (i, &ai) in a.iter().enumerate().take(n + 1) {
        if ai == Cplx::new(0.0, 0.0) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `1 / a` truncated to degree `n`; `a[0]` must be nonzero.
fn recip_trunc(a: &[Cplx], n: usize) -> Vec<Cplx> {
    let mut out = vec![Cplx::new(0.0, 0.0); n + 1];
    let inv0 = a[0].inv();
    out[0] = inv0;
    for k in 1..=n {
        let mut acc = Cplx::new(0.0, 0.0);
        for j in 1..=k.min(a.len() - 1) {
            acc += a[j] * out[k - j];
        }
        out[k] = -acc * inv0;
    }
    out
}

/// `outer(tail)` where `tail` has zero constant term, truncated to degree `n`.
fn compose_trunc(outer: &[Cplx], tail: &[Cplx], n: usize) -> Vec<Cplx> {
    let top = outer.len().min(n + 1);
    let mut acc = vec![Cplx::new(0.0, 0.0); n + 1];
    for k in (0..top).rev() {
        acc = mul_trunc(&acc, tail, n);
        acc[0] += outer[k];
    }
    acc
}
