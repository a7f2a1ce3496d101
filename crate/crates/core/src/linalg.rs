//! Hermitian matrix assembly and positive-semidefiniteness certification.
//!
//! Gram, Pick and block Pick matrices are assembled entrywise, symmetrized as
//! `(M + M*)/2` and handed to a cyclic complex Jacobi eigensolver. Verdicts
//! are three-valued so rounding noise near zero never flips a PSD answer.

use std::fmt::{self, Write as _};

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::kernels::{BallPoint, KernelError, KernelExpr};
use crate::Cplx;

/// Asymmetry above `HERM_TOL · scale` before symmetrization is reported.
pub const HERM_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm is below `OFF_TOL · scale`.
pub const OFF_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("kernel evaluation failed at pair ({i}, {j}): {source}")]
    Assembly {
        i: usize,
        j: usize,
        #[source]
        source: KernelError,
    },
    #[error("NO_CONVERGENCE: Jacobi left off-diagonal norm {off_norm:e} after {sweeps} sweeps")]
    NoConvergence { sweeps: usize, off_norm: f64, min_diag: f64 },
    #[error("LENGTH_MISMATCH: {nodes} nodes but {targets} targets")]
    LengthMismatch { nodes: usize, targets: usize },
    #[error("DIMENSION_MISMATCH: {0}")]
    DimensionMismatch(String),
    #[error("empty matrix")]
    Empty,
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Cplx>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Cplx>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Cplx::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn diag(values: &[Cplx]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Cplx {
        self.data[i * self.cols + j]
    }
}

/// Dense Hermitian matrix plus assembly metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    entries: Vec<Cplx>,
    scale: f64,
    asymmetry: f64,
    assembly: String,
}

impl HermitianMatrix {
    /// Symmetrizes `raw` (row-major, `n × n`) as `(M + M*)/2` and records how
    /// far from Hermitian the input was.
    pub fn from_raw(n: usize, raw: Vec<Cplx>, assembly: impl Into<String>) -> Result<Self, LinalgError> {
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        if raw.len() != n * n {
            return Err(LinalgError::DimensionMismatch(format!(
                "{n}×{n} matrix needs {} entries, got {}",
                n * n,
                raw.len()
            )));
        }
        let mut entries = raw.clone();
        let mut asymmetry: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let a = raw[i * n + j];
                let b = raw[j * n + i];
                asymmetry = asymmetry.max((a - b.conj()).norm());
                let s = (a + b.conj()) * 0.5;
                entries[i * n + j] = s;
                entries[j * n + i] = s.conj();
            }
        }
        let scale = entries.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        Ok(HermitianMatrix {
            n,
            entries,
            scale,
            asymmetry,
            assembly: assembly.into(),
        })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let raw = rows.iter().flatten().map(|&x| Cplx::new(x, 0.0)).collect();
        Self::from_raw(n, raw, "explicit")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Largest entry modulus.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Max `|M_ij - conj(M_ji)|` of the raw entries before symmetrization.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn assembly(&self) -> &str {
        &self.assembly
    }

    pub fn get(&self, i: usize, j: usize) -> Cplx {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Cplx] {
        &self.entries
    }

    /// Set when assembly produced asymmetry beyond `HERM_TOL · scale`.
    pub fn assembly_warning(&self) -> Option<String> {
        (self.asymmetry > HERM_TOL * self.scale.max(f64::MIN_POSITIVE)).then(|| {
            format!(
                "assembly asymmetry {:.3e} exceeds {:.1e}·scale before symmetrization",
                self.asymmetry, HERM_TOL
            )
        })
    }

    /// Entrywise difference, keeping `self`'s metadata tag.
    pub fn sub(&self, other: &HermitianMatrix) -> Result<HermitianMatrix, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        let raw = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        let mut m = HermitianMatrix::from_raw(self.n, raw, format!("{} - {}", self.assembly, other.assembly))?;
        m.asymmetry = m.asymmetry.max(self.asymmetry).max(other.asymmetry);
        Ok(m)
    }

    pub fn scaled(&self, k: f64) -> HermitianMatrix {
        HermitianMatrix {
            n: self.n,
            entries: self.entries.iter().map(|c| c * k).collect(),
            scale: self.scale * k.abs(),
            asymmetry: self.asymmetry * k.abs(),
            assembly: self.assembly.clone(),
        }
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn principal(&self, idx: &[usize]) -> Result<HermitianMatrix, LinalgError> {
        let raw = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        HermitianMatrix::from_raw(idx.len(), raw, format!("{}[sub]", self.assembly))
    }

    /// One line per row, `re,im` pairs separated by commas.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    out.push(',');
                }
                let c = self.get(i, j);
                let _ = write!(out, "{:e},{:e}", c.re, c.im);
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<&[Cplx]> = self.entries.chunks(self.n).collect();
        let mut st = s.serialize_struct("HermitianMatrix", 5)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("scale", &self.scale)?;
        st.serialize_field("asymmetry", &self.asymmetry)?;
        st.serialize_field("assembly", &self.assembly)?;
        st.serialize_field("entries", &rows)?;
        st.end()
    }
}

/// `entries[i][j] = K(pts[i], pts[j])`, then symmetrized.
pub fn gram(k: &KernelExpr, pts: &[BallPoint]) -> Result<HermitianMatrix, LinalgError> {
    let n = pts.len();
    let mut raw = Vec::with_capacity(n * n);
    for (i, z) in pts.iter().enumerate() {
        for (j, w) in pts.iter().enumerate() {
            let v = k.eval(z, w).map_err(|source| LinalgError::Assembly { i, j, source })?;
            raw.push(v);
        }
    }
    HermitianMatrix::from_raw(n, raw, format!("gram[{}; n={n}]", k.label()))
}

/// Pick matrix `(1 - λ_i conj(λ_j)) K(x_i, x_j)`.
pub fn pick_matrix(k: &KernelExpr, nodes: &[BallPoint], targets: &[Cplx]) -> Result<HermitianMatrix, LinalgError> {
    if nodes.len() != targets.len() {
        return Err(LinalgError::LengthMismatch {
            nodes: nodes.len(),
            targets: targets.len(),
        });
    }
    let n = nodes.len();
    let mut raw = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let kij = k
                .eval(&nodes[i], &nodes[j])
                .map_err(|source| LinalgError::Assembly { i, j, source })?;
            raw.push((Cplx::new(1.0, 0.0) - targets[i] * targets[j].conj()) * kij);
        }
    }
    HermitianMatrix::from_raw(n, raw, format!("pick[{}; n={n}]", k.label()))
}

/// Block Pick matrix for `s × t` targets: block `(i, j)` is
/// `(I_s - W_i W_j*) K(x_i, x_j)`, giving an `n·s`-dimensional matrix.
pub fn block_pick_matrix(
    k: &KernelExpr,
    nodes: &[BallPoint],
    mats: &[CMatrix],
) -> Result<HermitianMatrix, LinalgError> {
    if nodes.len() != mats.len() {
        return Err(LinalgError::LengthMismatch {
            nodes: nodes.len(),
            targets: mats.len(),
        });
    }
    let n = nodes.len();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    let (s, t) = (mats[0].rows, mats[0].cols);
    if let Some(bad) = mats.iter().find(|m| m.rows != s || m.cols != t) {
        return Err(LinalgError::DimensionMismatch(format!(
            "targets must all be {s}×{t}, found {}×{}",
            bad.rows, bad.cols
        )));
    }
    let dim = n * s;
    let mut raw = vec![Cplx::new(0.0, 0.0); dim * dim];
    for i in 0..n {
        for j in 0..n {
            let kij = k
                .eval(&nodes[i], &nodes[j])
                .map_err(|source| LinalgError::Assembly { i, j, source })?;
            let (wi, wj) = (&mats[i], &mats[j]);
            for p in 0..s {
                for q in 0..s {
                    let mut prod = Cplx::new(0.0, 0.0);
                    for r in 0..t {
                        prod += wi.get(p, r) * wj.get(q, r).conj();
                    }
                    let id = if p == q { 1.0 } else { 0.0 };
                    raw[(i * s + p) * dim + j * s + q] = (Cplx::new(id, 0.0) - prod) * kij;
                }
            }
        }
    }
    HermitianMatrix::from_raw(dim, raw, format!("block_pick[{}; n={n}, {s}×{t}]", k.label()))
}

/// All eigenvalues (ascending) by cyclic complex Jacobi rotations.
pub fn eigenvalues_hermitian(m: &HermitianMatrix) -> Result<Vec<f64>, LinalgError> {
    let n = m.n;
    let mut a = m.entries.clone();
    let idx = |i: usize, j: usize| i * n + j;
    let target = OFF_TOL * m.scale;
    let off_norm = |a: &[Cplx]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[idx(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off = off_norm(&a);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            let min_diag = (0..n).map(|i| a[idx(i, i)].re).fold(f64::INFINITY, f64::min);
            return Err(LinalgError::NoConvergence {
                sweeps,
                off_norm: off,
                min_diag,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                // Negligible against both diagonal entries: drop it.
                if sweeps > 4 && app.abs() + 100.0 * mag == app.abs() && aqq.abs() + 100.0 * mag == aqq.abs() {
                    a[idx(p, q)] = Cplx::new(0.0, 0.0);
                    a[idx(q, p)] = Cplx::new(0.0, 0.0);
                    continue;
                }
                // Conjugating column/row q by the phase of a_pq makes it real,
                // after which a real plane rotation annihilates it.
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[idx(r, p)];
                    let arq = a[idx(r, q)] * phase.conj();
                    let new_rp = arp * c - arq * s;
                    let new_rq = arp * s + arq * c;
                    a[idx(r, p)] = new_rp;
                    a[idx(p, r)] = new_rp.conj();
                    a[idx(r, q)] = new_rq;
                    a[idx(q, r)] = new_rq.conj();
                }
                a[idx(p, p)] = Cplx::new(app - t * mag, 0.0);
                a[idx(q, q)] = Cplx::new(aqq + t * mag, 0.0);
                a[idx(p, q)] = Cplx::new(0.0, 0.0);
                a[idx(q, p)] = Cplx::new(0.0, 0.0);
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)].re).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

pub fn min_eig_hermitian(m: &HermitianMatrix) -> Result<f64, LinalgError> {
    Ok(eigenvalues_hermitian(m)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PsdStatus {
    Psd,
    NotPsd,
    Inconclusive,
}

impl PsdStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PsdStatus::Psd => "PSD",
            PsdStatus::NotPsd => "NOT_PSD",
            PsdStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for PsdStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub status: PsdStatus,
    pub min_eig: f64,
    pub tol_used: f64,
}

impl PsdVerdict {
    /// PSD when `min_eig ≥ -tol`, NOT_PSD below `-10·tol`, INCONCLUSIVE in between.
    pub fn classify(min_eig: f64, tol: f64) -> Self {
        let status = if !min_eig.is_finite() {
            PsdStatus::Inconclusive
        } else if min_eig >= -tol {
            PsdStatus::Psd
        } else if min_eig < -10.0 * tol {
            PsdStatus::NotPsd
        } else {
            PsdStatus::Inconclusive
        };
        PsdVerdict {
            status,
            min_eig,
            tol_used: tol,
        }
    }
}

/// `1e-9 · max(1, scale)`.
pub fn default_tol(m: &HermitianMatrix) -> f64 {
    1e-9 * m.scale.max(1.0)
}

/// Eigensolver failure degrades to INCONCLUSIVE rather than an error.
pub fn psd_verdict(m: &HermitianMatrix, tol: f64) -> PsdVerdict {
    match min_eig_hermitian(m) {
        Ok(e) => PsdVerdict::classify(e, tol),
        Err(_) => PsdVerdict {
            status: PsdStatus::Inconclusive,
            min_eig: f64::NAN,
            tol_used: tol,
        },
    }
}
