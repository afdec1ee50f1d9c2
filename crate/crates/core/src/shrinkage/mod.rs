//! Candidate shrinkage families on a fixed penalty basis.
//!
//! Every estimator here has the form `ξ̂ = f z` for a shrinkage vector
//! `f ∈ [0, 1]^p` applied componentwise to the canonical coefficients. The
//! families differ in which `f` they allow:
//!
//! | family | shrinkage vectors                                      |
//! |--------|--------------------------------------------------------|
//! | LS     | `f = 1`                                                |
//! | PLS    | `f_i = 1 / (1 + ν λ_i)`, `ν ∈ [0, ∞]`                   |
//! | MS     | any nonincreasing `f`                                  |
//! | ST     | `f_i = [1 - t / |z_i|]_+`, `t ≥ 0`                      |
//! | HS     | MS on the first `⌊α p⌋` coordinates, ST on the rest     |
//!
//! Each family is adapted by minimizing its Stein-type risk estimate given a
//! variance estimate `σ̂²`.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::basis::{PenaltyBasis, Reconstruction};
use crate::error::{Error, Result};

mod hybrid;
mod isotonic;
mod monotone;
mod threshold;
mod variance;

pub use hybrid::{hs_adapt, split_index};
pub use isotonic::isotonic_decreasing_fit;
pub use monotone::{ms_adapt, ms_risk_estimate, pls_adapt, pls_grid, pls_shrinkage};
pub use threshold::{
    soft_threshold_factors, st_adapt, st_risk_estimate, universal_cap, universal_threshold,
};
pub use variance::{
    default_variance, high_component_variance, variance_high_component, variance_least_squares,
    VarianceEstimate, VarianceMethod,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Ls,
    Pls,
    Ms,
    St,
    Hs,
}

impl Family {
    /// Report order.
    pub const ALL: [Family; 5] = [Family::Ls, Family::Pls, Family::Ms, Family::St, Family::Hs];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ls => "LS",
            Family::Pls => "PLS",
            Family::Ms => "MS",
            Family::St => "ST",
            Family::Hs => "HS",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|fam| fam.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or(Error::InvalidConfig(
                "family must be one of ls, pls, ms, st, hs",
            ))
    }
}

/// A shrinkage vector together with the tuning values that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkagePlan {
    pub f: Vec<f64>,
    pub family: Family,
    /// PLS penalty weight; may be `f64::INFINITY`.
    pub nu: Option<f64>,
    /// Soft threshold (ST, and the ST half of HS).
    pub threshold: Option<f64>,
    /// HS split fraction.
    pub alpha: Option<f64>,
    /// HS split point `⌊α p⌋`.
    pub split: Option<usize>,
}

impl ShrinkagePlan {
    pub fn least_squares(p: usize) -> Self {
        Self::bare(Family::Ls, alloc::vec![1.0; p])
    }

    pub(crate) fn bare(family: Family, f: Vec<f64>) -> Self {
        Self {
            f,
            family,
            nu: None,
            threshold: None,
            alpha: None,
            split: None,
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// `ξ̂ = f z`.
    pub fn shrink(&self, z: &[f64]) -> Vec<f64> {
        self.f.iter().zip(z).map(|(f, z)| f * z).collect()
    }
}

/// An estimated risk; may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskEstimate {
    pub value: f64,
    pub family: Family,
    /// HS only: `(MS part on the first p1 coordinates, ST part on the rest)`.
    pub components: Option<(f64, f64)>,
}

/// Fitted values of `U diag(f) U'y`.
pub fn apply_plan(basis: &PenaltyBasis, plan: &ShrinkagePlan) -> Result<Reconstruction> {
    if plan.len() != basis.p() {
        return Err(Error::LengthMismatch {
            expected: basis.p(),
            got: plan.len(),
        });
    }
    basis.reconstruct(&plan.shrink(basis.z()))
}

/// The family's risk estimator evaluated at `plan`.
pub fn estimate_risk(plan: &ShrinkagePlan, z: &[f64], sigma2: f64) -> RiskEstimate {
    let (value, components) = match plan.family {
        Family::Ls => (sigma2, None),
        Family::Pls | Family::Ms => (ms_risk_estimate(&plan.f, z, sigma2), None),
        Family::St => (
            st_risk_estimate(plan.threshold.unwrap_or(0.0), z, sigma2),
            None,
        ),
        Family::Hs => {
            let p = z.len();
            let p1 = plan.split.unwrap_or(0).min(p);
            let ms_part = ms_risk_estimate(&plan.f[..p1], &z[..p1], sigma2);
            let st_part = st_risk_estimate(plan.threshold.unwrap_or(0.0), &z[p1..], sigma2);
            (
                hybrid::combine(p1, p - p1, ms_part, st_part),
                Some((ms_part, st_part)),
            )
        }
    };
    RiskEstimate {
        value,
        family: plan.family,
        components,
    }
}

pub(crate) fn ave(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}
