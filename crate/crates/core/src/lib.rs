//! Lattice points in hyperbolic regions
//! `H_{l,r}(n) = { i in N^r : e_l(i_1, ..., i_r) <= n }`, where `e_l` is the
//! `l`-th elementary symmetric polynomial.
//!
//! The crate provides
//!
//! - exact evaluation of elementary symmetric polynomials ([`sympoly`]),
//! - exact cardinalities of the regions and of their scaled, divisibility
//!   constrained and product-capped variants ([`counting`]),
//! - exact uniform sampling by unranking ([`sampling`]),
//! - integer kernels for GCD/LCM, sieving and valuations ([`arith`]),
//! - the limiting objects for GCD/LCM statistics of uniform points ([`limits`]),
//! - statistical gates and structured reports tying the two together
//!   ([`experiments`], [`stats`], [`verify`]).

// `!(x > 0.0)` style checks are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod counting;
mod error;
pub mod exact;
pub mod experiments;
pub mod limits;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod sympoly;
pub mod verify;

pub use counting::{CountValue, ProductCap, Rational, RegionSpec, ScaleVector};
pub use error::{Error, Result};
pub use sampling::{LatticePoint, Method, Sampler, SamplerConfig};
