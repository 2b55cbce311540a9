//! Clifford-valued fields on periodic grids, the Dirac operator, and
//! numerical checks of Dirac-Sobolev type inequalities with explicit constants.

// `!(x >= 0.0)` is used on purpose: it rejects NaN along with negatives
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod constants;
pub mod dirac;
pub mod error;
pub mod families;
pub mod fft;
pub mod gamma;
pub mod grid;
pub mod harness;
pub mod report;
pub mod summation;
pub mod zero_modes;

pub use clifford::{AlgebraSignature, Multivector, ScalarField};
pub use error::{Error, Result};
