// NaN must fail parameter checks, hence the negated comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod formulas;
pub mod dynamics;
pub mod estimators;
pub mod geometry;

pub use error::{Error, Result};
