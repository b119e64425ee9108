//! Closest-point projections in normed spaces and numerical probes of
//! projection theorems.
//!
//! Modules:
//! - [`norms`]: strictly convex norms, Gauss map and support points.
//! - [`cantor`]: Cantor staircases and the planar C^1 norm built from one.
//! - [`projections`]: linear projection families and their associated maps.
//! - [`fractals`]: deterministic point clouds of self-similar sets.
//! - [`boxdim`]: box-counting dimension estimates.
//! - [`sweep`]: direction sweeps of projected dimensions.
//! - [`checks`]: the cross-cutting verification suite.

// `!(x > 0.0)` style guards also reject NaN, which is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boxdim;
pub mod cantor;
pub mod checks;
pub mod error;
pub mod fractals;
pub mod linalg;
pub mod norms;
pub mod projections;
pub mod search;
pub mod sweep;
pub mod vecops;

pub use error::{Error, Result};
