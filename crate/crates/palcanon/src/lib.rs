//! Canonical forms of complex square matrices under congruence and
//! *congruence, the spectra of the associated palindromic pencils
//! `A + λA^⋆`, classification of matrices into the generic bundles indexed
//! by their unit-eigenvalue count, explicit perturbation constructions with
//! closed-form spectra, and a Monte Carlo experiment harness.

// Indexed loops and `% 2` parity tests keep the factorization kernels in
// the usual linear-algebra shape; `!(x > 0.0)` deliberately traps NaN.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::manual_is_multiple_of)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod classify;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod io;
pub mod lu;
pub mod matrix;
pub mod perturb;
pub mod rng;
pub mod spectrum;

pub use error::{Error, Result};
pub use matrix::{direct_sum, CMatrix, Complex, StarKind};
