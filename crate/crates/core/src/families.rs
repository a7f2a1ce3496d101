//! Named families of Schur-class functions `b` together with their closed
//! forms: the inverse `h` and the extension witness `q = (z - b(0)) / h`.
//!
//! | family            | b(z)            | h(w)           | q(z)           |
//! |-------------------|-----------------|----------------|----------------|
//! | `affine`          | (z + A) / B     | Bw - A         | 1 / B          |
//! | `moebius_over`    | Az / (z + B)    | Bw / (A - w)   | (A - z) / B    |
//! | `scaled_identity` | z / R           | Rw             | 1 / R          |
//! | `blaschke` (α)    | (z-α)/(1-ᾱz)    | (w+α)/(1+ᾱw)   | 1 + ᾱz         |
//! | `power` (k = 1)   | z               | w              | 1              |
//!
//! Blaschke products of degree ≥ 2 and `z^k` for `k ≥ 2` are not injective
//! and have no witness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::{de_cplx, de_cplx_vec};
use crate::pickinterp::blaschke_product;
use crate::series::{PowerSeries, SeriesError};
use crate::Cplx;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("invalid family parameters: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum BFamily {
    Affine {
        #[serde(rename = "A", deserialize_with = "de_cplx")]
        a: Cplx,
        #[serde(rename = "B", deserialize_with = "de_cplx")]
        b: Cplx,
    },
    MoebiusOver {
        #[serde(rename = "A", deserialize_with = "de_cplx")]
        a: Cplx,
        #[serde(rename = "B", deserialize_with = "de_cplx")]
        b: Cplx,
    },
    Blaschke {
        #[serde(deserialize_with = "de_cplx_vec")]
        zeros: Vec<Cplx>,
    },
    ScaledIdentity {
        #[serde(rename = "R")]
        r: f64,
    },
    Power {
        k: u32,
    },
}

/// Either a named family or an explicit series literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BSpec {
    Family(BFamily),
    Series(PowerSeries),
}

fn zero() -> Cplx {
    Cplx::new(0.0, 0.0)
}

fn one() -> Cplx {
    Cplx::new(1.0, 0.0)
}

impl BFamily {
    fn check(&self) -> Result<(), FamilyError> {
        let bad = |m: String| Err(FamilyError::InvalidParameter(m));
        match self {
            BFamily::Affine { a, b } | BFamily::MoebiusOver { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    return bad("A and B must be finite".into());
                }
                if b.norm() == 0.0 {
                    return bad("B must be nonzero".into());
                }
                if matches!(self, BFamily::MoebiusOver { .. }) && a.norm() == 0.0 {
                    return bad("A must be nonzero for Az/(z+B)".into());
                }
                Ok(())
            }
            BFamily::Blaschke { zeros } => match zeros.iter().find(|z| !(z.norm() < 1.0)) {
                Some(z) => bad(format!("Blaschke zero {z} is outside the open disk")),
                None => Ok(()),
            },
            BFamily::ScaledIdentity { r } => {
                if !(r.is_finite() && *r != 0.0) {
                    return bad(format!("R must be finite and nonzero, got {r}"));
                }
                Ok(())
            }
            BFamily::Power { .. } => Ok(()),
        }
    }

    /// Taylor series of `b` at 0 with `order + 1` coefficients.
    pub fn series(&self, order: usize) -> Result<PowerSeries, FamilyError> {
        self.check()?;
        let mut coeffs = vec![zero(); order + 1];
        match self {
            BFamily::Affine { a, b } => {
                coeffs[0] = a / b;
                if order >= 1 {
                    coeffs[1] = b.inv();
                }
            }
            BFamily::MoebiusOver { a, b } => {
                // (A/B) z Σ (-z/B)^n
                let mut p = a / b;
                for c in coeffs.iter_mut().skip(1) {
                    *c = p;
                    p *= -b.inv();
                }
            }
            BFamily::Blaschke { zeros } => return Ok(blaschke_product(zeros, order)),
            BFamily::ScaledIdentity { r } => {
                if order >= 1 {
                    coeffs[1] = Cplx::new(1.0 / r, 0.0);
                }
            }
            BFamily::Power { k } => {
                if let Some(c) = coeffs.get_mut(*k as usize) {
                    *c = one();
                }
            }
        }
        Ok(PowerSeries::at_origin(coeffs)?)
    }

    /// Closed-form `b(z)` (no truncation).
    pub fn eval(&self, z: Cplx) -> Cplx {
        match self {
            BFamily::Affine { a, b } => (z + a) / b,
            BFamily::MoebiusOver { a, b } => a * z / (z + b),
            BFamily::Blaschke { zeros } => zeros
                .iter()
                .map(|&w| crate::pickinterp::blaschke_factor(w, z))
                .product(),
            BFamily::ScaledIdentity { r } => z / *r,
            BFamily::Power { k } => z.powu(*k),
        }
    }

    /// Closed-form inverse `h(w)` where one exists.
    pub fn inverse(&self, w: Cplx) -> Option<Cplx> {
        match self {
            BFamily::Affine { a, b } => Some(b * w - a),
            BFamily::MoebiusOver { a, b } => Some(b * w / (a - w)),
            BFamily::ScaledIdentity { r } => Some(w * *r),
            BFamily::Blaschke { zeros } if zeros.len() == 1 => {
                let al = zeros[0];
                Some((w + al) / (one() + al.conj() * w))
            }
            BFamily::Power { k: 1 } => Some(w),
            _ => None,
        }
    }

    /// The shipped extension witness `q = (z - b(0)) / h(z)` as a series at 0.
    pub fn witness(&self, order: usize) -> Option<PowerSeries> {
        let mut coeffs = vec![zero(); order.max(1) + 1];
        match self {
            BFamily::Affine { b, .. } => coeffs[0] = b.inv(),
            BFamily::MoebiusOver { a, b } => {
                coeffs[0] = a / b;
                coeffs[1] = -b.inv();
            }
            BFamily::ScaledIdentity { r } => coeffs[0] = Cplx::new(1.0 / r, 0.0),
            BFamily::Blaschke { zeros } if zeros.len() == 1 => {
                coeffs[0] = one();
                coeffs[1] = zeros[0].conj();
            }
            BFamily::Power { k: 1 } => coeffs[0] = one(),
            _ => return None,
        }
        PowerSeries::at_origin(coeffs).ok()
    }

    pub fn label(&self) -> String {
        match self {
            BFamily::Affine { a, b } => format!("(z + {a}) / {b}"),
            BFamily::MoebiusOver { a, b } => format!("{a}·z / (z + {b})"),
            BFamily::Blaschke { zeros } => format!("blaschke{zeros:?}"),
            BFamily::ScaledIdentity { r } => format!("z / {r}"),
            BFamily::Power { k } => format!("z^{k}"),
        }
    }
}

impl BSpec {
    pub fn series(&self, order: usize) -> Result<PowerSeries, FamilyError> {
        match self {
            BSpec::Family(f) => f.series(order),
            BSpec::Series(s) => Ok(s.clone()),
        }
    }

    pub fn witness(&self, order: usize) -> Option<PowerSeries> {
        match self {
            BSpec::Family(f) => f.witness(order),
            BSpec::Series(_) => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            BSpec::Family(f) => f.label(),
            BSpec::Series(s) => format!("series(N={})", s.order()),
        }
    }
}
