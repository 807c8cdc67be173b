//! Contour dynamics for the two-dimensional Muskat and water-wave problems.
//!
//! The crate follows an interface from a graph-like initial state to a vertical
//! tangent, past the Rayleigh-Taylor sign change, and continues it on a complex
//! strip of analyticity once the real-space problem becomes ill-posed.
//!
//! Module map:
//! - [`curve`]: interface samples, derivatives, arc-chord, slope and graph checks
//! - [`singular`]: Birkhoff-Rott and Muskat principal-value sums
//! - [`closures`]: Darcy and Euler amplitude closures, tangential speed
//! - [`stepping`] and [`driver`]: RK4 with spectral filtering, event detection
//! - [`initial_data`]: turning constructions, sign certificate, perturbations
//! - [`diagnostics`]: Rayleigh-Taylor functions, norms, weights, energy distances
//! - [`strip`] and [`continuation`]: strip extension and successive approximations
//! - [`scenario`]: configuration, pipelines, artifacts and plots

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closures;
pub mod continuation;
pub mod curve;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod initial_data;
pub mod quadrature;
pub mod scenario;
pub mod singular;
pub mod spectral;
pub mod stepping;
pub mod strip;

pub use curve::{Curve, Grid, SlopeReport, Topology};
pub use error::{Result, TurnwaveError};
pub use singular::Velocity;
