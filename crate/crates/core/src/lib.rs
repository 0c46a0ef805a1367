//! Ray-based classification of convex polytopes.
//!
//! A convex region is probed by shooting rays from an interior observation
//! point along a fixed set of directions and recording the distance to the
//! boundary along each one. This crate provides the geometry for those
//! queries, direction sets with certified density on the sphere, the
//! closed-form ray-count bounds, simulation-based checks of those bounds,
//! a synthetic quantum-dot cell generator and a small classifier.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod classify;
pub mod error;
pub mod fingerprint;
pub mod float_text;
pub mod geometry;
pub mod lp;
pub mod metrics;
pub mod qd;
pub mod rng;
pub mod sphere;

pub use error::{Error, Result};
pub use geometry::{ConvexPolytope, ExitRecord, HalfSpace, Ray, UnitDirection, ValidationReport, Vector};
pub use metrics::{AngleBound, ClassParams, PolytopeMetrics};
