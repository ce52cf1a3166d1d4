//! Flat surfaces in period coordinates, measured train tracks with the
//! Thurston form, extremal-length derivative checks, and an exactly
//! computable hyperbolic-plane model of orbit counting near the axis of a
//! hyperbolic element.
//!
//! Module map:
//! - [`flat_surface`]: triangulated half-translation surfaces, SL(2,R)
//!   action, flips, saddle connections, Delaunay canonicalization.
//! - [`train_track`]: tracks, weights, splits, the Thurston form, adapted
//!   tracks and reconstruction of a surface from track data.
//! - [`extremal_calculus`]: the symplectic pairing on period tangents,
//!   finite-difference checks, Busemann/Kerckhoff helpers, torus oracle.
//! - [`hyperbolic_sandbox`]: upper half-plane geometry and the
//!   projection/Busemann estimates along an axis.
//! - [`counting_harness`]: nets, cells, sector checks, orbit counts,
//!   measure quadrature and tube volumes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counting_harness;
pub mod error;
pub mod exec;
pub mod extremal_calculus;
pub mod flat_surface;
pub mod hyperbolic_sandbox;
pub mod report;
pub mod train_track;

pub use error::{Error, Result};
pub use exec::Exec;

/// Complex numbers used for edge vectors and upper half-plane points.
pub type C64 = nalgebra::Complex<f64>;
/// Real 2x2 matrices (the SL(2,R) action on edge vectors).
pub type Mat2 = nalgebra::Matrix2<f64>;

/// Report schema version stamped into every JSON report.
pub const SCHEMA_VERSION: u32 = 1;

#[inline]
pub(crate) fn cross(u: C64, v: C64) -> f64 {
    u.re * v.im - u.im * v.re
}

#[inline]
pub(crate) fn dot(u: C64, v: C64) -> f64 {
    u.re * v.re + u.im * v.im
}
