//! Horizontal calculus on stratified Lie groups, with numerical verification
//! of Hardy, Rellich, Caffarelli-Kohn-Nirenberg and p-sub-Laplacian
//! inequalities and of the sharpness of their constants.
//!
//! The crate is organised around six pieces:
//!
//! * [`group`] — concrete stratified groups (abelian, Heisenberg, step-2),
//!   their dilations, group law and left-invariant generator coefficients;
//! * [`calculus`] — pointwise horizontal operators (`X_k`, `∇_H`, `div_H`,
//!   sub-Laplacian, p-sub-Laplacian and its weighted variant) evaluated by
//!   propagating second-order jets;
//! * [`quad`] — adaptive tensor Gauss-Legendre quadrature over truncated
//!   boxes with first-stratum excision, plus a dense midpoint oracle;
//! * [`functions`] — the function families the inequalities quantify over:
//!   annular bumps, seeded random fields, extremizers and cutoff sequences,
//!   critical-case g-functions and superharmonic pairs;
//! * [`suite`] — evaluation of both sides of every inequality, producing
//!   [`suite::InequalityReport`]s with quadrature error bars and verdicts;
//! * [`sharpness`] — ratio traces along cutoff extremizer sequences that
//!   approach the sharp constants from below.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature to route transcendental math through `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod calculus;
pub mod fd;
pub mod functions;
pub mod group;
pub mod jet;
mod math;
pub mod quad;
pub mod scalar;
pub mod sharpness;
pub mod suite;

pub use group::{GroupKind, Point, StratifiedGroup};
pub use jet::Jet2;
pub use quad::{DomainSpec, IntegralValue, QuadratureSpec};
pub use scalar::ScalarField;
pub use suite::{InequalityCase, InequalityReport, Verdict};

/// Maximum ambient dimension supported by the fixed-size jet storage.
pub const MAX_DIM: usize = 6;
