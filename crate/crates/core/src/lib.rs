// NaN-rejecting argument checks are written as negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod characters;
pub mod cli;
pub mod density;
pub mod error;
pub mod gauss_sums;
pub mod par;
pub mod quadrature;
pub mod sieve;
pub mod symbols;
pub mod transform;
pub mod verify;
pub mod weight;
pub mod zint;

pub use error::{Error, Result};
