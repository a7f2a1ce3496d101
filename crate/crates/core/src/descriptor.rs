//! JSON-facing descriptors: complex scalars, `b`-specs and kernel trees.
//!
//! Complex numbers are accepted as a bare real (`0.5`), a pair (`[0.3, 0.1]`)
//! or a string (`"0.3+0.1i"`, `"-0.2i"`).

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dbr::{self, DbrError};
use crate::families::{BSpec, FamilyError};
use crate::kernels::{BallPoint, KernelError, KernelExpr};
use crate::series::PowerSeries;
use crate::Cplx;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescriptorError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Dbr(#[from] DbrError),
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`), or `a,b`.
pub fn parse_cplx(s: &str) -> Result<Cplx, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let num = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| format!("bad number {x:?} in {s:?}")),
        }
    };
    if let Some((re, im)) = t.split_once(',') {
        let re = re.parse::<f64>().map_err(|_| format!("bad real part in {s:?}"))?;
        let im = im.parse::<f64>().map_err(|_| format!("bad imaginary part in {s:?}"))?;
        return Ok(Cplx::new(re, im));
    }
    let body = match t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        None => {
            return t
                .parse::<f64>()
                .map(|re| Cplx::new(re, 0.0))
                .map_err(|_| format!("bad number {s:?}"))
        }
        Some(b) => b,
    };
    // split at the last sign that is not the leading one and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(Cplx::new(
            body[..i].parse::<f64>().map_err(|_| format!("bad real part in {s:?}"))?,
            num(&body[i..])?,
        )),
        None => Ok(Cplx::new(0.0, num(body)?)),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CplxRepr {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl CplxRepr {
    fn into_cplx<E: de::Error>(self) -> Result<Cplx, E> {
        match self {
            CplxRepr::Real(x) => Ok(Cplx::new(x, 0.0)),
            CplxRepr::Pair([re, im]) => Ok(Cplx::new(re, im)),
            CplxRepr::Text(s) => parse_cplx(&s).map_err(E::custom),
        }
    }
}

pub fn de_cplx<'de, D: Deserializer<'de>>(d: D) -> Result<Cplx, D::Error> {
    CplxRepr::deserialize(d)?.into_cplx()
}

pub fn de_cplx_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Cplx>, D::Error> {
    Vec::<CplxRepr>::deserialize(d)?
        .into_iter()
        .map(CplxRepr::into_cplx)
        .collect()
}

/// A base point: one complex value for disk kernels, or a list for the ball.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSpec(pub BallPoint);

impl<'de> Deserialize<'de> for PointSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            One(CplxRepr),
            Many(Vec<CplxRepr>),
        }
        Ok(PointSpec(match Repr::deserialize(d)? {
            Repr::One(c) => BallPoint::disk(c.into_cplx()?),
            Repr::Many(cs) => BallPoint::new(cs.into_iter().map(CplxRepr::into_cplx).collect::<Result<_, _>>()?),
        }))
    }
}

/// Kernel tree as read from JSON; mirrors [`KernelExpr`] with `b`-specs in
/// place of raw series for de Branges-Rovnyak nodes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelDescriptor {
    Szego {},
    DruryArveson {
        dim: usize,
    },
    WeightedHardy {
        weights: Vec<f64>,
    },
    Dbr {
        b: BSpec,
    },
    Constant {
        c: f64,
    },
    Sum {
        left: Box<KernelDescriptor>,
        right: Box<KernelDescriptor>,
    },
    Pullback {
        inner: Box<KernelDescriptor>,
        map: PowerSeries,
    },
    Congruence {
        inner: Box<KernelDescriptor>,
        factor: PowerSeries,
    },
    NormalizedDefect {
        inner: Box<KernelDescriptor>,
        base: PointSpec,
    },
}

impl KernelDescriptor {
    /// Builds and validates the kernel; named `b` families are expanded to
    /// `order` terms.
    pub fn resolve(&self, order: usize) -> Result<KernelExpr, DescriptorError> {
        let k = match self {
            KernelDescriptor::Szego {} => KernelExpr::Szego,
            KernelDescriptor::DruryArveson { dim } => KernelExpr::drury_arveson(*dim)?,
            KernelDescriptor::WeightedHardy { weights } => KernelExpr::weighted_hardy(weights.clone())?,
            KernelDescriptor::Dbr { b } => dbr::dbr_kernel(&b.series(order)?)?,
            KernelDescriptor::Constant { c } => KernelExpr::constant(*c)?,
            KernelDescriptor::Sum { left, right } => KernelExpr::sum(left.resolve(order)?, right.resolve(order)?)?,
            KernelDescriptor::Pullback { inner, map } => KernelExpr::pullback(inner.resolve(order)?, map.clone())?,
            KernelDescriptor::Congruence { inner, factor } => {
                KernelExpr::congruence(inner.resolve(order)?, factor.clone())?
            }
            KernelDescriptor::NormalizedDefect { inner, base } => {
                KernelExpr::cnp_defect(inner.resolve(order)?, base.0.clone())?
            }
        };
        k.validate()?;
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cplx {
        Cplx::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_cplx("0").unwrap(), c(0.0, 0.0));
        assert_eq!(parse_cplx("-0.5").unwrap(), c(-0.5, 0.0));
        assert_eq!(parse_cplx("0.3+0.1i").unwrap(), c(0.3, 0.1));
        assert_eq!(parse_cplx("0.3 - 0.1i").unwrap(), c(0.3, -0.1));
        assert_eq!(parse_cplx("-0.2i").unwrap(), c(0.0, -0.2));
        assert_eq!(parse_cplx("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_cplx("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_cplx("1e-3+2e-1j").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_cplx("0.25,-0.5").unwrap(), c(0.25, -0.5));
        for bad in ["", "abc", "1+", "+", "0.3+xi", "1,2,3"] {
            assert!(parse_cplx(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn kernel_descriptor_tree() {
        let d: KernelDescriptor = serde_json::from_str(
            r#"{"kind":"normalized_defect","base":"0.1i","inner":{"kind":"dbr","b":{"family":"affine","A":0,"B":2}}}"#,
        )
        .unwrap();
        let k = d.resolve(16).unwrap();
        assert!(matches!(k, KernelExpr::NormalizedDefect { .. }));

        let d: KernelDescriptor = serde_json::from_str(r#"{"kind":"dbr","b":{"coeffs":[[0,0],[0,0],[1,0]]}}"#).unwrap();
        assert!(matches!(d.resolve(64).unwrap(), KernelExpr::Dbr { .. }));

        let d: KernelDescriptor = serde_json::from_str(r#"{"kind":"dbr","b":{"family":"scaled_identity","R":0.5}}"#).unwrap();
        assert!(matches!(d.resolve(8), Err(DescriptorError::Dbr(_))));

        assert!(serde_json::from_str::<KernelDescriptor>(r#"{"kind":"nope"}"#).is_err());
        assert!(serde_json::from_str::<KernelDescriptor>(r#"{"kind":"szego","extra":1}"#).is_err());
    }
}
