//! Scalar Nevanlinna-Pick problems and the Schur algorithm for the Szegő
//! kernel.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::de_cplx_vec;
use crate::kernels::{BallPoint, KernelExpr};
use crate::linalg::{self, LinalgError, PsdVerdict};
use crate::series::PowerSeries;
use crate::Cplx;

/// Pick matrices with smallest eigenvalue at or below this are rejected by
/// the interpolant construction.
pub const STRICT_EPS: f64 = 1e-8;
pub const MIN_SEPARATION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PickError {
    #[error("NOT_STRICTLY_SOLVABLE: Pick matrix minimum eigenvalue {min_eig:e} is not above {STRICT_EPS:e}")]
    NotStrictlySolvable { min_eig: f64 },
    #[error("invalid interpolation problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemWire")]
pub struct InterpolationProblem {
    nodes: Vec<Cplx>,
    targets: Vec<Cplx>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemWire {
    #[serde(deserialize_with = "de_cplx_vec")]
    nodes: Vec<Cplx>,
    #[serde(deserialize_with = "de_cplx_vec")]
    targets: Vec<Cplx>,
}

impl TryFrom<ProblemWire> for InterpolationProblem {
    type Error = PickError;

    fn try_from(w: ProblemWire) -> Result<Self, Self::Error> {
        InterpolationProblem::new(w.nodes, w.targets)
    }
}

impl InterpolationProblem {
    pub fn new(nodes: Vec<Cplx>, targets: Vec<Cplx>) -> Result<Self, PickError> {
        if nodes.len() != targets.len() {
            return Err(PickError::InvalidProblem(format!(
                "{} nodes but {} targets",
                nodes.len(),
                targets.len()
            )));
        }
        if nodes.is_empty() {
            return Err(PickError::InvalidProblem("no nodes".into()));
        }
        for (i, z) in nodes.iter().enumerate() {
            if !(z.norm() < 1.0) {
                return Err(PickError::InvalidProblem(format!("node {z} is outside the open disk")));
            }
            if nodes[..i].iter().any(|w| (w - z).norm() < MIN_SEPARATION) {
                return Err(PickError::InvalidProblem(format!("node {z} is repeated")));
            }
        }
        if let Some(t) = targets.iter().find(|t| !t.is_finite()) {
            return Err(PickError::InvalidProblem(format!("target {t} is not finite")));
        }
        Ok(InterpolationProblem { nodes, targets })
    }

    pub fn nodes(&self) -> &[Cplx] {
        &self.nodes
    }

    pub fn targets(&self) -> &[Cplx] {
        &self.targets
    }

    pub fn ball_nodes(&self) -> Vec<BallPoint> {
        self.nodes.iter().map(|&z| BallPoint::disk(z)).collect()
    }
}

pub fn pick_solvable(p: &InterpolationProblem, k: &KernelExpr, tol: f64) -> Result<PsdVerdict, LinalgError> {
    let m = linalg::pick_matrix(k, &p.ball_nodes(), p.targets())?;
    Ok(linalg::psd_verdict(&m, tol))
}

/// Disk automorphism `(z - a) / (1 - ā z)`.
pub fn blaschke_factor(a: Cplx, z: Cplx) -> Cplx {
    (z - a) / (Cplx::new(1.0, 0.0) - a.conj() * z)
}

/// Output of the Schur recursion: `f_k = (γ_k + b_k f_{k+1}) / (1 + conj(γ_k) b_k f_{k+1})`
/// with `b_k` the Blaschke factor at node `k` and the last stage constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurInterpolant {
    /// `(node, Schur parameter)` per recursion step.
    pub params: Vec<(Cplx, Cplx)>,
}

impl SchurInterpolant {
    pub fn eval(&self, z: Cplx) -> Cplx {
        let mut it = self.params.iter().rev();
        let mut f = match it.next() {
            Some(&(_, g)) => g,
            None => return Cplx::new(0.0, 0.0),
        };
        for &(node, g) in it {
            let u = blaschke_factor(node, z) * f;
            f = (g + u) / (Cplx::new(1.0, 0.0) + g.conj() * u);
        }
        f
    }

    /// `|f(x_i) - λ_i|` per node.
    pub fn residuals(&self, p: &InterpolationProblem) -> Vec<f64> {
        p.nodes()
            .iter()
            .zip(p.targets())
            .map(|(&z, &t)| (self.eval(z) - t).norm())
            .collect()
    }

    /// Max of `|f|` over `samples` equally spaced points on the circle of radius `r`.
    pub fn sampled_sup(&self, r: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
                self.eval(Cplx::from_polar(r, theta)).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Schur algorithm for strictly solvable Szegő-kernel data.
pub fn schur_interpolant(p: &InterpolationProblem) -> Result<SchurInterpolant, PickError> {
    let m = linalg::pick_matrix(&KernelExpr::Szego, &p.ball_nodes(), p.targets())?;
    let min_eig = linalg::min_eig_hermitian(&m)?;
    if !(min_eig > STRICT_EPS) {
        return Err(PickError::NotStrictlySolvable { min_eig });
    }
    let nodes = p.nodes();
    let mut w = p.targets().to_vec();
    let mut params = Vec::with_capacity(nodes.len());
    for k in 0..nodes.len() {
        let g = w[k];
        if !(g.norm() < 1.0) {
            return Err(PickError::NotStrictlySolvable { min_eig });
        }
        params.push((nodes[k], g));
        for j in k + 1..nodes.len() {
            let moved = (w[j] - g) / (Cplx::new(1.0, 0.0) - g.conj() * w[j]);
            w[j] = moved / blaschke_factor(nodes[k], nodes[j]);
        }
    }
    Ok(SchurInterpolant { params })
}

/// Finite Blaschke product `Π (z - z_k)/(1 - conj(z_k) z)` as a series at 0.
pub fn blaschke_product(zeros: &[Cplx], order: usize) -> PowerSeries {
    let mut acc = PowerSeries::constant(Cplx::new(0.0, 0.0), Cplx::new(1.0, 0.0), order);
    for &a in zeros {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(-a);
        let mut p = Cplx::new(1.0 - a.norm_sqr(), 0.0);
        for _ in 1..=order {
            coeffs.push(p);
            p *= a.conj();
        }
        let factor = PowerSeries::at_origin(coeffs).expect("finite Blaschke coefficients");
        acc = acc.mul(&factor).expect("common center");
    }
    acc
}
