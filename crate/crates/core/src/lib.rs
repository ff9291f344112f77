//! Surface tensors, harmonic intrinsic volumes and shape reconstruction of
//! convex bodies in R² and R³.

// `!(x > 0.0)` is used deliberately so NaN is rejected along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bodies;
pub mod cli;
pub mod error;
pub mod harmonics;
pub mod measures;
pub mod minkowski;
pub mod reconstruct;
pub mod sphere;
pub mod stability;
pub mod tensors;
pub mod uniqueness;

pub use error::{Error, Result};
