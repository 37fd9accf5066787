//! Sharp Moser-Trudinger and Adams constants on product Sobolev spaces,
//! quadrature of the associated exponential functionals on radial profiles,
//! and a ground-state solver for Kirchhoff systems with a Choquard coupling.

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod choquard;
pub mod error;
pub mod functionals;
pub mod kcs;
pub mod radial;
pub mod sequences;
pub mod special;

pub use error::{Error, Result};
