use alloc::vec::Vec;

use super::{ave, isotonic_decreasing_fit, Family, ShrinkagePlan};
use crate::error::{Error, Result};

/// Eigenvalues at or below this count as kernel directions for `ν = ∞`.
const KERNEL_EIGENVALUE: f64 = 1e-9;
const PLS_GRID_POINTS: usize = 60;

/// `f_i = 1 / (1 + ν λ_i)`; `ν = ∞` keeps only the kernel of the penalty.
pub fn pls_shrinkage(eigenvalues: &[f64], nu: f64) -> Result<ShrinkagePlan> {
    if nu.is_nan() || nu < 0.0 {
        return Err(Error::InvalidPenaltyWeight);
    }
    let f = eigenvalues
        .iter()
        .map(|&l| {
            if nu == f64::INFINITY {
                if l <= KERNEL_EIGENVALUE {
                    1.0
                } else {
                    0.0
                }
            } else {
                1.0 / (1.0 + nu * l)
            }
        })
        .collect();
    let mut plan = ShrinkagePlan::bare(Family::Pls, f);
    plan.nu = Some(nu);
    Ok(plan)
}

/// `0`, 60 log-spaced weights from `1e-6` to `1e6`, then `∞`.
pub fn pls_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(PLS_GRID_POINTS + 2);
    grid.push(0.0);
    let span = (PLS_GRID_POINTS - 1) as f64;
    grid.extend((0..PLS_GRID_POINTS).map(|k| libm::pow(10.0, -6.0 + 12.0 * k as f64 / span)));
    grid.push(f64::INFINITY);
    grid
}

/// Grid search for the PLS weight minimizing the MS risk estimate. Ties go
/// to the smaller weight.
pub fn pls_adapt(eigenvalues: &[f64], z: &[f64], sigma2: f64) -> ShrinkagePlan {
    let mut best: Option<(f64, ShrinkagePlan)> = None;
    for nu in pls_grid() {
        let plan = pls_shrinkage(eigenvalues, nu).expect("grid weights are valid");
        let risk = ms_risk_estimate(&plan.f, z, sigma2);
        if best.as_ref().map_or(true, |(r, _)| risk < *r) {
            best = Some((risk, plan));
        }
    }
    best.expect("grid is nonempty").1
}

/// `ave[f² σ̂² + (1 - f)² (z² - σ̂²)]`; unbiased for the risk when `σ̂² = σ²`.
pub fn ms_risk_estimate(f: &[f64], z: &[f64], sigma2: f64) -> f64 {
    ave(f
        .iter()
        .zip(z)
        .map(|(&f, &z)| f * f * sigma2 + (1.0 - f) * (1.0 - f) * (z * z - sigma2)))
}

/// Minimizes the MS risk estimate over nonincreasing `f ∈ [0, 1]^p`.
///
/// Writing the estimate as `ave[(f - ĝ)² z²] + σ̂² ave(ĝ)` with
/// `ĝ = (z² - σ̂²) / z²` turns this into a weighted isotonic fit of `ĝ` with
/// weights `z²`, followed by taking positive parts. Where `z_i = 0` the
/// weight vanishes and `ĝ_i` is set to 0.
pub fn ms_adapt(z: &[f64], sigma2: f64) -> ShrinkagePlan {
    let weights: Vec<f64> = z.iter().map(|v| v * v).collect();
    if !weights.iter().any(|&w| w > 0.0) {
        // Every coordinate contributes σ̂² (2 f_i - 1): shrink all the way.
        return ShrinkagePlan::bare(Family::Ms, alloc::vec![0.0; z.len()]);
    }
    let g: Vec<f64> = weights
        .iter()
        .map(|&w| if w > 0.0 { (w - sigma2) / w } else { 0.0 })
        .collect();
    let k = isotonic_decreasing_fit(&g, &weights).expect("weights are positive somewhere");
    let f = k.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
    ShrinkagePlan::bare(Family::Ms, f)
}
