//! Numerical and exact building blocks for amplified sup-norm bounds of
//! cusp forms of square-free level.

// `!(x > 0.0)` is the NaN-rejecting guard used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments, clippy::should_implement_trait)]

pub mod amplifier;
pub mod arith;
pub mod counting;
pub mod error;
pub mod exponents;
pub mod kloosterman;
pub mod oscillatory;
pub mod special;
pub mod suites;
pub mod transforms;

pub use error::{Error, Result};
