//! A consensus proximal-splitting engine for problems of the form
//! `min h(Z)` subject to `Z ∈ affine ∩ cone`, where `h` has a cheap
//! closed-form proximal map, the affine set collects the lifted measurement
//! rows (plus an optional trace row), and the cone is either the PSD cone or
//! the rotated structure set used by the certification programs.

mod admm;
mod affine;
mod cone;
mod prox;

pub use admm::{admm_solve, SolveConfig, SolveReport, SolveStatus};
pub use affine::AffineConstraintSet;
pub use cone::{prox_structure, ConeSet};
pub use prox::{prox_g, prox_l1_trace, prox_psd, ProxSpec};
