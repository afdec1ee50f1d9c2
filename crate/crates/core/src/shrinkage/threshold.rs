use alloc::vec::Vec;

use super::{Family, ShrinkagePlan};
use crate::error::{Error, Result};

/// `σ̂² p⁻¹ Σ [1 - 2·1(|z_i| ≤ t)] + p⁻¹ Σ (|z_i| ∧ t)²`, Stein's unbiased
/// risk estimate for soft-thresholding at `t`.
pub fn st_risk_estimate(t: f64, z: &[f64], sigma2: f64) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let p = z.len() as f64;
    let mut below = 0usize;
    let mut clipped = 0.0;
    for &v in z {
        let a = libm::fabs(v);
        if a <= t {
            below += 1;
        }
        let m = a.min(t);
        clipped += m * m;
    }
    sigma2 * (1.0 - 2.0 * below as f64 / p) + clipped / p
}

/// `[1 - t / |z_i|]_+`, with 0 where `z_i = 0`.
pub fn soft_threshold_factors(z: &[f64], t: f64) -> Vec<f64> {
    z.iter()
        .map(|&v| {
            let a = libm::fabs(v);
            if a > 0.0 {
                (1.0 - t / a).max(0.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// `(2 log len)^{1/2}`, zero for `len <= 1`.
pub fn universal_threshold(len: usize) -> f64 {
    if len <= 1 {
        0.0
    } else {
        libm::sqrt(2.0 * libm::log(len as f64))
    }
}

/// The universal threshold in data units: `σ̂ (2 log len)^{1/2}`.
pub fn universal_cap(len: usize, sigma2: f64) -> f64 {
    libm::sqrt(sigma2.max(0.0)) * universal_threshold(len)
}

/// Minimizes [`st_risk_estimate`] over `t ∈ [0, t_cap]`.
///
/// Between consecutive `|z_i|` the estimate is nondecreasing in `t`, so only
/// `0`, the `|z_i| ≤ t_cap` and `t_cap` itself need checking. Ties go to the
/// smallest threshold.
pub fn st_adapt(z: &[f64], sigma2: f64, t_cap: f64) -> Result<ShrinkagePlan> {
    if z.is_empty() {
        return Err(Error::EmptyInput);
    }
    let cap = if t_cap.is_nan() { 0.0 } else { t_cap.max(0.0) };
    let mut sorted: Vec<f64> = z.iter().map(|v| libm::fabs(*v)).collect();
    sorted.sort_by(f64::total_cmp);
    let mut prefix_sq = Vec::with_capacity(sorted.len() + 1);
    prefix_sq.push(0.0);
    for a in &sorted {
        prefix_sq.push(prefix_sq.last().unwrap() + a * a);
    }
    let p = sorted.len() as f64;
    let risk_at = |t: f64| {
        let below = sorted.partition_point(|&a| a <= t);
        let above = sorted.len() - below;
        sigma2 * (1.0 - 2.0 * below as f64 / p) + (prefix_sq[below] + t * t * above as f64) / p
    };

    let mut best_t = 0.0;
    let mut best_risk = risk_at(0.0);
    let candidates = sorted
        .iter()
        .copied()
        .take_while(|&a| a <= cap)
        .chain(core::iter::once(cap));
    for t in candidates {
        if t <= best_t {
            continue;
        }
        let risk = risk_at(t);
        if risk < best_risk {
            best_risk = risk;
            best_t = t;
        }
    }

    let mut plan = ShrinkagePlan::bare(Family::St, soft_threshold_factors(z, best_t));
    plan.threshold = Some(best_t);
    Ok(plan)
}
