//! Natural reversible extensions of partial dynamical systems.
//!
//! A partial dynamical system is a continuous map `α: Δ → M` defined on a
//! closed subset `Δ` of a compact state space `M`. Given a closed set
//! `Y ⊇ M ∖ α(Δ)`, its reversible extension is the space of backward-orbit
//! chains `(x₀, x₁, …)` with `α(xₙ₊₁) = xₙ`, either terminating at a point of
//! `Y` or continuing forever. The extension map prepends `α(x₀)` and its
//! inverse is the shift.
//!
//! The crate is organised as follows:
//!
//! - [`dynamics`]: state spaces, partial maps with enumerable preimage
//!   branches, orbits, ω-limit sets and semiconjugacy checks.
//! - [`extension`]: chains, the extension map and its inverse, strata
//!   sampling, the product-topology metric, Hausdorff distance and lifts of
//!   semiconjugacies.
//! - [`logistic`]: the family `4λx(1−x)`, its parameter sequences, regime
//!   classification and symbolic continuum graphs.
//! - [`circle`]: circle homeomorphisms through their lifts, rotation numbers
//!   and the shapes of their extensions.
//! - [`operator`]: finite partial-permutation models of the generating
//!   operators and exact checks of the covariance relations.

pub mod circle;
pub mod dynamics;
pub mod error;
pub mod extension;
pub mod logistic;
pub mod operator;
pub mod roots;
pub mod space;

pub use error::{Error, Result};

/// Residual tolerance for chain conditions and branch inverses.
pub const EPS_CHAIN: f64 = 1e-9;

/// Tolerance for domain and interval membership at boundaries.
pub const EPS_DOM: f64 = 1e-12;
