//! Low-discrepancy one-bit tessellations of the sphere `S^d`.
//!
//! A point set `Z = {z_1, .., z_N}` on `S^d` defines the sign-linear map
//! `x -> (sgn(z_j . x))_j` into the Hamming cube. The map is an almost
//! isometry from normalized geodesic distance to Hamming distance exactly
//! when the wedge discrepancy of `Z` is small. This crate provides:
//!
//! - [`sphere`]: points, geodesic distance, sphere constants and moments,
//! - [`partition`]: recursive zonal equal-area partitions with samplers,
//! - [`onebit`]: the sign embedding, wedges, slices and the pointwise error,
//! - [`discrepancy`]: exact L² discrepancies through the invariance
//!   identities, Monte-Carlo estimators, and a sup-discrepancy bracket,
//! - [`energy`]: the discrete wedge energy, frame potential and a
//!   Riemannian descent minimizer,
//! - [`bounds`]: the explicit constants and size bounds,
//! - [`sampling`]: random and jittered point-set generators.
//!
//! The crate is `no_std` and only needs `alloc`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;

pub mod bounds;
pub mod discrepancy;
pub mod energy;
mod error;
pub mod onebit;
pub mod partition;
pub mod quad;
pub mod rng;
pub mod sampling;
pub mod sphere;

pub use error::{Error, Result};
pub use onebit::{BitVector, Method, PointSet, PointSetMeta, Wedge};
pub use partition::Partition;
pub use sphere::{Point, SphereConstants};
