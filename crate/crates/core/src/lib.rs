//! Adaptive shrinkage estimators for the means of a Gaussian one-way layout
//! with an ordinal factor.
//!
//! The pipeline runs bottom-up:
//!
//! * [`layout`] groups replicate observations by factor level and computes the
//!   least-squares baseline.
//! * [`penalty`] builds banded penalty matrices: difference operators for
//!   equally spaced levels and local polynomial annihilators for arbitrary ones.
//! * [`basis`] turns a layout and a penalty matrix into an orthonormal penalty
//!   basis and the canonical coefficients `z` of the data.
//! * [`shrinkage`] holds the candidate shrinkage families (penalized least
//!   squares, monotone shrinkage, soft-thresholding and their hybrid), their
//!   Stein-type risk estimates, and the variance estimators.
//! * [`adapt`] minimizes estimated risk jointly over penalty matrices, split
//!   fractions and shrinkage vectors.
//! * [`oracle`] carries ground truth: losses, the Pinsker bound, the
//!   artificial mean generators and Monte Carlo harnesses.
//!
//! The crate is `no_std` and only needs `alloc`. Enable the `std` feature to
//! get `std::error::Error` plumbing through `thiserror`.

#![no_std]
// NaN must fail the validity checks, so negated comparisons are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod adapt;
pub mod basis;
mod error;
pub mod layout;
pub mod linalg;
pub mod oracle;
pub mod penalty;
pub mod shrinkage;

pub use adapt::{
    compare, default_alphas, fit, Candidates, FitConfig, FitResult, GridWarning, PenaltySet,
    RiskReport,
};
pub use basis::{PenaltyBasis, Spectrum};
pub use error::{Error, Result};
pub use layout::{Layout, LsBaseline};
pub use penalty::{PenaltyKind, PenaltyMatrix, PenaltySelector};
pub use shrinkage::{Family, RiskEstimate, ShrinkagePlan, VarianceEstimate, VarianceMethod};
