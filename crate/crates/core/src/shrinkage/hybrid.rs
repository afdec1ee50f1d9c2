use super::variance::floor_fraction;
use super::{
    ms_adapt, ms_risk_estimate, st_adapt, st_risk_estimate, universal_cap, Family, RiskEstimate,
    ShrinkagePlan,
};
use crate::error::{Error, Result};

/// `p1 = ⌊α p⌋`.
pub fn split_index(alpha: f64, p: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidSplit);
    }
    Ok(floor_fraction(alpha, p).min(p))
}

pub(crate) fn combine(p1: usize, p2: usize, ms_part: f64, st_part: f64) -> f64 {
    let p = (p1 + p2) as f64;
    (p1 as f64 * ms_part + p2 as f64 * st_part) / p
}

/// MS on the first `⌊α p⌋` coefficients, ST on the rest.
///
/// The two halves are adapted separately: MS as in [`ms_adapt`], ST with its
/// threshold capped at `σ̂ (2 log p2)^{1/2}`. The combined estimate is
/// `p⁻¹ [p1 r̂_MS + p2 r̂_ST]`.
pub fn hs_adapt(z: &[f64], sigma2: f64, alpha: f64) -> Result<(ShrinkagePlan, RiskEstimate)> {
    let p = z.len();
    let p1 = split_index(alpha, p)?;
    let p2 = p - p1;
    let (head, tail) = z.split_at(p1);

    let ms_plan = ms_adapt(head, sigma2);
    let ms_part = ms_risk_estimate(&ms_plan.f, head, sigma2);
    let (st_f, threshold, st_part) = if p2 > 0 {
        let st_plan = st_adapt(tail, sigma2, universal_cap(p2, sigma2))?;
        let t = st_plan.threshold.unwrap_or(0.0);
        (st_plan.f, Some(t), st_risk_estimate(t, tail, sigma2))
    } else {
        (alloc::vec::Vec::new(), None, 0.0)
    };

    let mut f = ms_plan.f;
    f.extend(st_f);
    let plan = ShrinkagePlan {
        f,
        family: Family::Hs,
        nu: None,
        threshold,
        alpha: Some(alpha),
        split: Some(p1),
    };
    let risk = RiskEstimate {
        value: combine(p1, p2, ms_part, st_part),
        family: Family::Hs,
        components: Some((ms_part, st_part)),
    };
    Ok((plan, risk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shrinkage::estimate_risk;

    const Z: [f64; 10] = [9.0, -4.0, 2.5, 0.3, -0.2, 3.1, 0.1, -0.05, 0.4, 1.2];

    #[test]
    fn alpha_zero_is_soft_thresholding() {
        let (plan, risk) = hs_adapt(&Z, 0.5, 0.0).unwrap();
        let st = st_adapt(&Z, 0.5, universal_cap(Z.len(), 0.5)).unwrap();
        assert_eq!(plan.f, st.f);
        assert_eq!(plan.threshold, st.threshold);
        assert_eq!(plan.split, Some(0));
        let direct = st_risk_estimate(st.threshold.unwrap(), &Z, 0.5);
        assert!((risk.value - direct).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_is_monotone_shrinkage() {
        let (plan, risk) = hs_adapt(&Z, 0.5, 1.0).unwrap();
        let ms = ms_adapt(&Z, 0.5);
        assert_eq!(plan.f, ms.f);
        assert_eq!(plan.threshold, None);
        assert!((risk.value - ms_risk_estimate(&ms.f, &Z, 0.5)).abs() < 1e-15);
    }

    #[test]
    fn risk_decomposition() {
        let (plan, risk) = hs_adapt(&Z, 0.5, 0.3).unwrap();
        assert_eq!(plan.split, Some(3));
        let (ms_part, st_part) = risk.components.unwrap();
        assert_eq!(risk.value, (3.0 * ms_part + 7.0 * st_part) / 10.0);
        assert_eq!(estimate_risk(&plan, &Z, 0.5), risk);
        assert!(plan.f[..3].windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn invalid_split() {
        assert_eq!(hs_adapt(&Z, 0.5, 1.5).unwrap_err(), Error::InvalidSplit);
        assert_eq!(hs_adapt(&Z, 0.5, -0.1).unwrap_err(), Error::InvalidSplit);
        assert_eq!(
            hs_adapt(&Z, 0.5, f64::NAN).unwrap_err(),
            Error::InvalidSplit
        );
    }
}
