//! Radial profiles of gradient Kähler-Ricci and gradient scalar solitons
//! obtained by the Calabi ansatz over eta-Einstein Sasaki manifolds.
//!
//! The crate builds and verifies:
//!
//! - the parameter algebra of eta-Einstein structures and their D-homothetic
//!   transformations ([`sasaki`]);
//! - closed-form soliton profiles `phi(sigma)` and their ODE residuals
//!   ([`profile`]);
//! - the root `mu` of the shrinking-soliton closure equation with a
//!   sign-change uniqueness certificate ([`mu_solver`]);
//! - radial reconstruction `sigma(s)`, the Kähler potential `s + F(s)`,
//!   geodesic lengths, and cone-aperture coefficients ([`radial`]);
//! - endpoint classification: complete ends, smooth extension onto the zero
//!   section of a line bundle, bundle admissibility ([`classify`]);
//! - self-similar flows, their `t -> 0` cone limits, and the gluing of a
//!   shrinking and an expanding soliton into an eternal flow ([`flow`]);
//! - gradient scalar solitons on `(1, oo)` and their Ricci specialization
//!   ([`scalar`]);
//! - an independent full-metric check of the soliton identity on the
//!   two-complex-dimensional radial model ([`fullmetric`]);
//! - deterministic CSV/JSON reporting ([`report`]).

// Negated comparisons like `!(x > 0.0)` are used on purpose throughout:
// unlike `x <= 0.0` they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
pub mod flow;
pub mod fullmetric;
pub mod mu_solver;
pub mod ode;
pub mod profile;
pub mod quad;
pub mod radial;
pub mod report;
pub mod sasaki;
pub mod scalar;

pub use error::{Result, SolitonError};
pub use profile::{RadialProfile, SolitonProfile};
pub use sasaki::{ConeAperture, EtaEinsteinStructure, LineBundleData};
