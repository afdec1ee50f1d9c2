//! Full adaptation: joint minimization of estimated risk over penalty
//! matrices, HS split fractions and shrinkage vectors.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::basis::{PenaltyBasis, Spectrum};
use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::penalty::PenaltySelector;
use crate::shrinkage::{
    apply_plan, default_variance, hs_adapt, ms_adapt, ms_risk_estimate, pls_adapt, st_adapt,
    st_risk_estimate, universal_cap, Family, ShrinkagePlan, VarianceEstimate,
};

/// Which penalty matrices to try.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PenaltySet {
    /// `d1..d6`, skipping degrees the layout is too small for.
    Differences,
    /// `a1..a6`, skipping degrees the layout is too small for.
    Annihilators,
    /// Exactly these, in this order; an infeasible degree is an error.
    Explicit(Vec<PenaltySelector>),
}

impl PenaltySet {
    fn selectors(&self, p: usize) -> Vec<PenaltySelector> {
        match self {
            Self::Differences => PenaltySelector::differences(),
            Self::Annihilators => PenaltySelector::annihilators(),
            Self::Explicit(list) => return list.clone(),
        }
        .into_iter()
        .filter(|s| s.degree() < p)
        .collect()
    }

    fn len(&self) -> usize {
        match self {
            Self::Explicit(list) => list.len(),
            _ => PenaltySelector::MAX_DEGREE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub penalties: PenaltySet,
    /// HS split fractions, searched in order. `0` and `1` are always added.
    pub alphas: Vec<f64>,
    pub families: Vec<Family>,
    /// Fraction `c` for the high-component variance with `q = ⌊c p⌋`. When
    /// absent, least squares is used if `n > p` and `c = 0.75` otherwise.
    pub q_fraction: Option<f64>,
    /// Carried through for simulations; fitting itself is deterministic.
    pub seed: Option<u64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            penalties: PenaltySet::Differences,
            alphas: default_alphas(),
            families: Family::ALL.to_vec(),
            q_fraction: None,
            seed: None,
        }
    }
}

/// `{0.05 k : 0 <= k <= 20}`.
pub fn default_alphas() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

/// A search grid larger than `p^{1/2}`; selection over large classes erodes
/// the reliability of the estimated risks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridWarning {
    pub grid: &'static str,
    pub size: usize,
    pub limit: f64,
}

impl core::fmt::Display for GridWarning {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{} grid has {} entries, more than sqrt(p) = {:.2}",
            self.grid, self.size, self.limit
        )
    }
}

impl FitConfig {
    pub fn with_family(mut self, family: Family) -> Self {
        self.families = alloc::vec![family];
        self
    }

    pub fn with_penalty(mut self, penalty: PenaltySelector) -> Self {
        self.penalties = PenaltySet::Explicit(alloc::vec![penalty]);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alphas = alloc::vec![alpha];
        self
    }

    pub fn with_q_fraction(mut self, c: f64) -> Self {
        self.q_fraction = Some(c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::NoFamily);
        }
        if let PenaltySet::Explicit(list) = &self.penalties {
            if list.is_empty() {
                return Err(Error::InvalidConfig("penalty set is empty"));
            }
        }
        if self.families.contains(&Family::Hs) && self.alphas.is_empty() {
            return Err(Error::InvalidConfig("alpha set is empty"));
        }
        if self.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidSplit);
        }
        if let Some(c) = self.q_fraction {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::InvalidConfig("q fraction must lie in (0, 1]"));
            }
        }
        Ok(())
    }

    /// Grids whose size exceeds `p^{1/2}`.
    pub fn warnings(&self, p: usize) -> Vec<GridWarning> {
        let limit = libm::sqrt(p as f64);
        let mut out = Vec::new();
        if self.penalties.len() as f64 > limit {
            out.push(GridWarning {
                grid: "penalty",
                size: self.penalties.len(),
                limit,
            });
        }
        if self.families.contains(&Family::Hs) && self.alphas.len() as f64 > limit {
            out.push(GridWarning {
                grid: "alpha",
                size: self.alphas.len(),
                limit,
            });
        }
        out
    }

    /// Requested families, deduplicated, in report order.
    fn family_list(&self) -> Vec<Family> {
        Family::ALL
            .into_iter()
            .filter(|f| self.families.contains(f))
            .collect()
    }

    fn alpha_list(&self) -> Vec<f64> {
        let mut alphas = self.alphas.clone();
        for extra in [0.0, 1.0] {
            if !alphas.contains(&extra) {
                alphas.push(extra);
            }
        }
        alphas
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub family: Family,
    pub penalty: PenaltySelector,
    /// HS only.
    pub alpha: Option<f64>,
    pub plan: ShrinkagePlan,
    pub estimated_risk: f64,
    pub sigma2: VarianceEstimate,
    /// Canonical coefficients in the chosen basis.
    pub z: Vec<f64>,
    pub mu_hat: Vec<f64>,
    pub eta_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    pub economy: Vec<(usize, f64)>,
}

/// One independently adapted fit per requested family, in report order.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub rows: Vec<FitResult>,
}

impl RiskReport {
    pub fn row(&self, family: Family) -> Option<&FitResult> {
        self.rows.iter().find(|r| r.family == family)
    }
}

/// Penalty spectra for one design (level grid and replication counts),
/// reusable across any number of responses on that design.
#[derive(Debug, Clone)]
pub struct Candidates {
    levels: Vec<f64>,
    counts: Vec<usize>,
    spectra: Vec<(PenaltySelector, Arc<Spectrum>)>,
}

impl Candidates {
    pub fn new(layout: &Layout, penalties: &PenaltySet) -> Result<Self> {
        Self::for_design(layout.levels(), &layout.counts(), penalties)
    }

    pub fn for_design(levels: &[f64], counts: &[usize], penalties: &PenaltySet) -> Result<Self> {
        let selectors = penalties.selectors(levels.len());
        if selectors.is_empty() {
            return Err(Error::InvalidDegree {
                degree: 1,
                levels: levels.len(),
            });
        }
        let spectra = selectors
            .into_iter()
            .map(|sel| {
                let pm = sel.build(levels)?;
                Ok((sel, Arc::new(Spectrum::new(levels, counts, &pm)?)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            levels: levels.to_vec(),
            counts: counts.to_vec(),
            spectra,
        })
    }

    pub fn penalties(&self) -> impl Iterator<Item = PenaltySelector> + '_ {
        self.spectra.iter().map(|(s, _)| *s)
    }

    /// Global minimizer of estimated risk over penalties, families and split
    /// fractions. Ties go to the earliest penalty, then family in report
    /// order, then split fraction in grid order.
    pub fn fit(&self, layout: &Layout, config: &FitConfig) -> Result<FitResult> {
        let search = self.search(layout, config)?;
        search.overall.finish(layout, &search.bases)
    }

    /// Each requested family adapted on its own.
    pub fn compare(&self, layout: &Layout, config: &FitConfig) -> Result<RiskReport> {
        let search = self.search(layout, config)?;
        let rows = search
            .per_family
            .into_iter()
            .map(|c| c.finish(layout, &search.bases))
            .collect::<Result<Vec<_>>>()?;
        Ok(RiskReport { rows })
    }

    fn search(&self, layout: &Layout, config: &FitConfig) -> Result<Search> {
        config.validate()?;
        if layout.levels() != self.levels.as_slice() || layout.counts() != self.counts {
            return Err(Error::PenaltyLayoutMismatch(
                "candidates built for another design",
            ));
        }
        let families = config.family_list();
        let alphas = config.alpha_list();

        let mut bases = Vec::with_capacity(self.spectra.len());
        let mut per_family: Vec<Option<Candidate>> = alloc::vec![None; families.len()];
        let mut overall: Option<Candidate> = None;

        for (b, (sel, spectrum)) in self.spectra.iter().enumerate() {
            let basis = PenaltyBasis::from_spectrum(spectrum.clone(), layout)?;
            let var = default_variance(&basis, config.q_fraction)?;
            for (slot, &family) in per_family.iter_mut().zip(&families) {
                for cand in evaluate(family, &basis, var.sigma2, &alphas, b, *sel)? {
                    if slot.as_ref().map_or(true, |c| cand.risk < c.risk) {
                        *slot = Some(cand.clone());
                    }
                    if overall.as_ref().map_or(true, |c| cand.risk < c.risk) {
                        overall = Some(cand);
                    }
                }
            }
            bases.push((basis, var));
        }

        Ok(Search {
            bases,
            per_family: per_family
                .into_iter()
                .map(|c| c.expect("nonempty grid"))
                .collect(),
            overall: overall.expect("nonempty grid"),
        })
    }
}

struct Search {
    bases: Vec<(PenaltyBasis, VarianceEstimate)>,
    per_family: Vec<Candidate>,
    overall: Candidate,
}

#[derive(Debug, Clone)]
struct Candidate {
    basis: usize,
    penalty: PenaltySelector,
    plan: ShrinkagePlan,
    risk: f64,
}

impl Candidate {
    fn finish(
        self,
        layout: &Layout,
        bases: &[(PenaltyBasis, VarianceEstimate)],
    ) -> Result<FitResult> {
        let (basis, var) = &bases[self.basis];
        let rec = apply_plan(basis, &self.plan)?;
        let residuals = layout
            .values()
            .iter()
            .zip(&rec.eta_hat)
            .map(|(y, e)| y - e)
            .collect();
        Ok(FitResult {
            family: self.plan.family,
            penalty: self.penalty,
            alpha: self.plan.alpha,
            estimated_risk: self.risk,
            sigma2: *var,
            z: basis.z().to_vec(),
            mu_hat: rec.mu_hat,
            eta_hat: rec.eta_hat,
            residuals,
            economy: basis.economy_profile(),
            plan: self.plan,
        })
    }
}

fn evaluate(
    family: Family,
    basis: &PenaltyBasis,
    sigma2: f64,
    alphas: &[f64],
    index: usize,
    penalty: PenaltySelector,
) -> Result<Vec<Candidate>> {
    let z = basis.z();
    let wrap = |plan: ShrinkagePlan, risk: f64| Candidate {
        basis: index,
        penalty,
        plan,
        risk,
    };
    Ok(match family {
        Family::Ls => alloc::vec![wrap(ShrinkagePlan::least_squares(z.len()), sigma2)],
        Family::Pls => {
            let plan = pls_adapt(basis.eigenvalues(), z, sigma2);
            let risk = ms_risk_estimate(&plan.f, z, sigma2);
            alloc::vec![wrap(plan, risk)]
        }
        Family::Ms => {
            let plan = ms_adapt(z, sigma2);
            let risk = ms_risk_estimate(&plan.f, z, sigma2);
            alloc::vec![wrap(plan, risk)]
        }
        Family::St => {
            let plan = st_adapt(z, sigma2, universal_cap(z.len(), sigma2))?;
            let risk = st_risk_estimate(plan.threshold.unwrap_or(0.0), z, sigma2);
            alloc::vec![wrap(plan, risk)]
        }
        Family::Hs => alphas
            .iter()
            .map(|&alpha| hs_adapt(z, sigma2, alpha).map(|(plan, risk)| wrap(plan, risk.value)))
            .collect::<Result<Vec<_>>>()?,
    })
}

pub fn fit(layout: &Layout, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    Candidates::new(layout, &config.penalties)?.fit(layout, config)
}

pub fn compare(layout: &Layout, config: &FitConfig) -> Result<RiskReport> {
    config.validate()?;
    Candidates::new(layout, &config.penalties)?.compare(layout, config)
}
