//! Sparse signal recovery from phaseless or phase-miscalibrated linear
//! measurements via lifted semidefinite programs, together with a certifier
//! that decides, for a known ground-truth instance, whether perfect recovery
//! is possible and which range of the sparsity/rank trade-off weight λ
//! achieves it.
//!
//! The crate is organized as:
//!
//! - [`lifting`] — domain types (signals, measurement ensembles, Hermitian
//!   matrices, support/sign patterns) and the pure algebra: lifting `x ↦ xx'`,
//!   cross-measurements, the objectives `f_λ` and `G`.
//! - [`solver`] — a consensus proximal-splitting engine for
//!   `min h(Z) s.t. Z ∈ affine ∩ cone` with exact projections for the PSD
//!   cone, the rotated structure set, and affine measurement constraints.
//! - [`lambda`] — the certification routines: the three relaxed solves
//!   `D̂_p`, the recoverability verdict with λ bounds, and reference bounds.
//! - [`recovery`] — the recovery-side programs (phase calibration, sparse
//!   phase retrieval, trace-only phase retrieval) and success metrics.
//! - [`harness`] — seeded instance generation, phase-transition sweeps,
//!   certifier-vs-solver consistency runs, CSV/JSON persistence and SVG
//!   plotting.
//!
//! Data-parallel trial loops use rayon when the default `parallel` feature is
//! enabled and fall back to sequential execution without it; results are
//! deterministic either way.

pub mod error;
pub mod harness;
pub mod lambda;
pub mod lifting;
pub mod par;
pub mod recovery;
pub mod solver;

#[doc(hidden)]
pub mod testutil;

pub use error::{Error, Result};
