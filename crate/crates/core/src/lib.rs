//! Numerical toolkit for the fourth-order conformally covariant boundary value problems
//! of the bilaplacian on the half-space and the unit ball.
//!
//! The crate is `no_std` with `alloc`. Floating-point special functions come from `libm`.

#![no_std]
// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bvp;
pub mod classification;
pub mod data;
pub mod error;
pub mod expr;
pub mod extras;
pub mod field;
pub mod geometry;
pub mod green;
pub mod kernels;
pub mod math;
pub mod ode;
pub mod operators;
pub mod polynomial;
pub mod quadrature;
pub mod stencil;

pub use error::{Error, Result};
pub use geometry::Dimension;
pub use operators::Model;
