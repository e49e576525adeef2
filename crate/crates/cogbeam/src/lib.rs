//! Link-level simulation toolkit for learning-based cognitive beamforming.
//!
//! A cognitive (secondary) transmitter observes primary-radio signals over a
//! learning window, estimates the covariance subspace those signals occupy,
//! and then transmits in the orthogonal complement so that, by TDD channel
//! reciprocity, its own emissions land in the null space of the primary
//! receivers' processing. The toolkit covers the full chain:
//!
//! - [`numerics`]: dense complex-matrix primitives with fixed conventions
//!   (descending eigenvalues, square-root factors, pseudo-inverse cutoffs).
//! - [`scenario`]: system configuration, Rayleigh channel draws, and the two
//!   primary-link designs (spatial multiplexing, eigenmode transmission).
//! - [`airlink`]: TDD activity schedules and the observation model at the
//!   cognitive transmitter.
//! - [`estimation`]: covariance, rank, noise-power, and subspace estimators.
//! - [`beamforming`]: null-space transmit design, water-filling, throughput,
//!   and the projection-SVD baseline.
//! - [`interference`]: leakage power at the primary receivers, its analytic
//!   bound, and the first-order subspace perturbation diagnostic.
//! - [`tradeoff`]: optimal split of a block between learning and
//!   transmission under peak or average power constraints.
//! - [`harness`]: seeded Monte-Carlo experiments with CSV output, driven by
//!   the `cogbeam` CLI.

// Validation guards are written as `!(x > 0.0)` on purpose: the negated
// comparison also catches NaN, which `x <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airlink;
pub mod beamforming;
pub mod estimation;
pub mod harness;
pub mod interference;
pub mod numerics;
pub mod scenario;
pub mod tradeoff;

pub use numerics::{CMat, C64};
