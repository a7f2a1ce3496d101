use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug, Clone)]
#[command(
    name = "cnpk",
    version,
    about = "Reproducing-kernel toolkit: CNP certification, H(b) criterion checks and Pick problems"
)]
pub struct Cli {
    /// Also write the full run report (with inputs digest) to this path
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,

    /// Series truncation order for named b-families
    #[arg(long, global = true, default_value_t = cnp_core::series::DEFAULT_ORDER)]
    pub order: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Certify the complete Nevanlinna-Pick property of a kernel on samples.
    /// Exit 0 PSD, 1 NOT_PSD, 2 INCONCLUSIVE, 3 input error.
    Cnp(CnpArgs),
    /// Run the H(b) criterion checks for a Schur-class b.
    /// Exit 0 PASS_WITH_EXTENSION, 1 FAIL, 2 PASS_NECESSARY, 3 input error.
    Hbcheck(HbArgs),
    /// Run a gallery suite and compare against expected verdicts.
    /// Exit 0 when every entry matches, 1 on a mismatch, 3 on a malformed suite.
    Gallery(GalleryArgs),
    /// Decide solvability of a scalar Pick problem, optionally building the
    /// Schur-algorithm interpolant. Exit 0 solvable, 1 not, 2 inconclusive.
    Pick(PickArgs),
}

/// Grid size written as `RADIIxANGLES`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSize {
    pub radii: usize,
    pub angles: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (r, t) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("grid must look like 6x12, got {s:?}"))?;
        let radii: usize = r.trim().parse().map_err(|_| format!("bad radius count {r:?}"))?;
        let angles: usize = t.trim().parse().map_err(|_| format!("bad angle count {t:?}"))?;
        if radii == 0 || angles == 0 {
            return Err("grid dimensions must be positive".into());
        }
        Ok(GridSize { radii, angles })
    }
}

impl std::fmt::Display for GridSize {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.radii, self.angles)
    }
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    /// Radial sample grid; ball kernels draw the same number of random points instead
    #[arg(long, default_value = "6x12")]
    pub grid: GridSize,

    /// Largest sample radius
    #[arg(long, default_value_t = 0.9)]
    pub rmax: f64,

    /// Seed for the random sample points
    #[arg(long, default_value_t = cnp_core::cnp::DEFAULT_SEED)]
    pub seed: u64,

    /// Number of seeded random points added to the grid
    #[arg(long, default_value_t = 8)]
    pub random: usize,

    /// Explicit sample points, comma separated (e.g. "0.5,-0.3+0.2i"), or a
    /// JSON list of points; replaces the grid and random points
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
}

impl Default for SampleArgs {
    fn default() -> Self {
        SampleArgs {
            grid: GridSize { radii: 6, angles: 12 },
            rmax: 0.9,
            seed: cnp_core::cnp::DEFAULT_SEED,
            random: 8,
            points: None,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CnpArgs {
    /// Kernel descriptor: a JSON file path or inline JSON
    #[arg(long)]
    pub kernel: String,

    /// Base point of the normalized defect (complex literal, or a JSON list for ball kernels)
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub base: String,

    #[command(flatten)]
    pub samples: SampleArgs,

    /// PSD tolerance [default: 1e-9·max(1, matrix scale)]
    #[arg(long)]
    pub tol: Option<f64>,

    /// Write the defect Gram matrix here (.csv for CSV, anything else for JSON)
    #[arg(long, value_name = "PATH")]
    pub export_matrix: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct HbArgs {
    /// b as a named family or series literal: a JSON file path or inline JSON
    #[arg(long)]
    pub b: String,

    /// Extension witness q: "auto" for the family's closed form, or a series
    /// literal (file path or inline JSON)
    #[arg(long)]
    pub witness: Option<String>,

    #[command(flatten)]
    pub samples: SampleArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GalleryArgs {
    /// Suite file (.toml or .json) [default: the built-in suite]
    #[arg(long)]
    pub suite: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PickArgs {
    /// Problem {"nodes": [...], "targets": [...]}: a JSON file path or inline JSON
    #[arg(long)]
    pub problem: String,

    /// Kernel descriptor [default: Szegő]
    #[arg(long)]
    pub kernel: Option<String>,

    /// Build the Schur-algorithm interpolant (Szegő kernel only)
    #[arg(long)]
    pub construct: bool,

    /// PSD tolerance [default: 1e-9·max(1, matrix scale)]
    #[arg(long)]
    pub tol: Option<f64>,

    /// Write the Pick matrix here (.csv for CSV, anything else for JSON)
    #[arg(long, value_name = "PATH")]
    pub export_matrix: Option<PathBuf>,
}
