//! Space curves from curvature and torsion profiles.
//!
//! Profiles are rational-linear functions of arc length. The crate integrates
//! the Frenet-Serret equations to build curves, estimates curvature and
//! torsion back from samples, classifies curves into the Euler spiral family
//! and related classes, and checks the geodesic, involute and developability
//! characterizations through derived curves and ruled surfaces.

// `!(x > 0.0)` is used on purpose so that NaN fails the test too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod constructions;
pub mod discrete;
pub mod error;
pub mod frenet;
pub mod io;
pub mod job;
pub mod profiles;

pub use error::{Error, Result};
