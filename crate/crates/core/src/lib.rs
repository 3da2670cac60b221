//! Weighted Bergman kernels for the polynomial spaces `H^0(P^n, O(k))` with
//! the L² norm restricted to a pseudoconcave domain `X = {ρ ≤ 0}` of the
//! affine chart, together with the flat model kernels they scale to, the
//! boundary form `μ` and radial equilibrium measures.
//!
//! Conventions: `dd^c = i∂∂̄/2π`. All forms are stored as raw complex
//! Hessians `H_ij = ∂²f/∂ζ_i∂ζ̄_j`; the density of `(dd^c f)^n/n!` against
//! Lebesgue measure is `det(H)/π^n`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bergman;
pub mod equilibrium;
mod error;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod real;

pub use error::Error;
pub use num_complex::Complex64 as C64;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
