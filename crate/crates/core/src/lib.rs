//! Numerical toolkit for reproducing kernels on the unit disk and ball.
//!
//! The crate builds kernel expressions (Szegő, Drury-Arveson, weighted
//! Hardy, de Branges-Rovnyak and combinators over them), assembles their
//! Gram and Pick matrices on finite sample sets and certifies positivity with
//! a Jacobi eigensolver. On top of that sit a sampled complete
//! Nevanlinna-Pick (CNP) certifier, the de Branges-Rovnyak `H(b)` criterion
//! checks built around the functional inverse of `b`, and a Schur-algorithm
//! interpolant for the Szegő kernel.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cnp;
pub mod dbr;
pub mod descriptor;
pub mod families;
pub mod kernels;
pub mod linalg;
pub mod pickinterp;
pub mod series;

pub use num_complex::Complex64 as Cplx;

pub use cnp::{CertReport, SampleGen, SampleSet};
pub use dbr::{CriterionReport, ExtensionWitness, Overall};
pub use kernels::{BallPoint, KernelExpr};
pub use linalg::{HermitianMatrix, PsdStatus, PsdVerdict};
pub use series::PowerSeries;
