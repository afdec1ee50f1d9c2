use crate::basis::PenaltyBasis;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceMethod {
    /// `|y - η_LS|² / (n - p)`; needs replication.
    LeastSquares,
    /// Pools the trailing `p - q` canonical coefficients with the residual.
    HighComponent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    pub sigma2: f64,
    pub method: VarianceMethod,
    /// Set for the high-component method only.
    pub q: Option<usize>,
}

/// `(n - q)^{-1} [Σ_{i>q} z_i² + residual_ss]` for `1 <= q <= min(p, n - 1)`.
pub fn high_component_variance(z: &[f64], residual_ss: f64, n: usize, q: usize) -> Result<f64> {
    let max = z.len().min(n.saturating_sub(1));
    if q == 0 || q > max {
        return Err(Error::InvalidQ { q, max });
    }
    let tail: f64 = z[q..].iter().map(|v| v * v).sum();
    Ok((tail + residual_ss) / (n - q) as f64)
}

pub fn variance_high_component(basis: &PenaltyBasis, q: usize) -> Result<VarianceEstimate> {
    let sigma2 = high_component_variance(basis.z(), basis.residual_ss(), basis.n(), q)?;
    Ok(VarianceEstimate {
        sigma2,
        method: VarianceMethod::HighComponent,
        q: Some(q),
    })
}

/// Present only when `n > p`.
pub fn variance_least_squares(basis: &PenaltyBasis) -> Option<VarianceEstimate> {
    let (n, p) = (basis.n(), basis.p());
    (n > p).then(|| VarianceEstimate {
        sigma2: basis.residual_ss() / (n - p) as f64,
        method: VarianceMethod::LeastSquares,
        q: None,
    })
}

/// Without a fraction: least squares when `n > p`, else high-component with
/// `q = ⌊0.75 p⌋`. With a fraction `c ∈ (0, 1]`: high-component with
/// `q = ⌊c p⌋`, clamped into `[1, min(p, n - 1)]`.
pub fn default_variance(basis: &PenaltyBasis, q_fraction: Option<f64>) -> Result<VarianceEstimate> {
    let (n, p) = (basis.n(), basis.p());
    let fraction = match q_fraction {
        Some(c) if !(c > 0.0 && c <= 1.0) => {
            return Err(Error::InvalidConfig("q fraction must lie in (0, 1]"))
        }
        Some(c) => c,
        None => match variance_least_squares(basis) {
            Some(v) => return Ok(v),
            None => 0.75,
        },
    };
    let q = floor_fraction(fraction, p).clamp(1, p.min(n - 1).max(1));
    variance_high_component(basis, q)
}

/// `⌊c p⌋`, forgiving products like `0.35 * 20 = 6.999999999999999`.
pub(crate) fn floor_fraction(c: f64, p: usize) -> usize {
    libm::floor(c * p as f64 + 1e-9) as usize
}
