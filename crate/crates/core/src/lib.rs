//! Riesz potentials of radial functions on R^d, Hardy-Littlewood-Sobolev
//! constants and bounds, and a harness that checks the bounds numerically.
//!
//! Module overview:
//! - [`special`]: log-gamma, unit ball and sphere measures, exponent helpers.
//! - [`radial`]: radial profiles and their strong and weak Lebesgue norms.
//! - [`kernel`]: Riesz potentials (plain, truncated, log-weighted) and the
//!   bilinear functional.
//! - [`maximal`]: radial Hardy-Littlewood maximal function, Hedberg split,
//!   Stein constant probes.
//! - [`bounds`]: closed-form constants and bounds.
//! - [`harness`]: sweeps that produce [`harness::CheckRecord`]s and reports.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod maximal;
pub mod optimize;
pub mod quadrature;
pub mod radial;
pub mod special;

pub use error::{Error, Result};
pub use quadrature::QuadratureSpec;
pub use radial::RadialProfile;
pub use special::{GeometricConstants, ProblemParams};
