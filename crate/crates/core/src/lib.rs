//! Spectral boundary layer rp-FEM for fourth order singularly perturbed
//! problems in one and two dimensions.
// index loops mirror the matrix formulas; negated comparisons also reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod approx1d;
pub mod error;
pub mod fem1d;
pub mod fem2d;
pub mod linsolve;
pub mod meshing;
pub mod polybasis;
pub mod problems;
pub mod study;
pub mod verify;

pub use error::{Error, Result};
