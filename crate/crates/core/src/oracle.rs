//! Ground truth for testing and simulation: losses, the Pinsker bound, the
//! artificial mean functions, seeded Monte Carlo harnesses and a brute-force
//! isotonic reference.
//!
//! Normal deviates come from ChaCha8 seeded through `seed_from_u64`, with
//! replicate `k` on stream `k`, fed to the ziggurat sampler of `rand_distr`.
//! Replicates are therefore independent of evaluation order.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::adapt::{Candidates, FitConfig};
use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::penalty::PenaltySelector;
use crate::shrinkage::{ave, ms_risk_estimate, soft_threshold_factors, st_risk_estimate, Family};

/// Identifies the pseudo-random stream in simulation metadata.
pub const GENERATOR: &str = "chacha8-stream/ziggurat (rand_chacha 0.9, rand_distr 0.5)";

/// `p⁻¹ Σ n_i (μ̂_i - μ_i)²`.
pub fn loss(mu_hat: &[f64], mu: &[f64], counts: &[usize]) -> Result<f64> {
    if mu_hat.len() != mu.len() || counts.len() != mu.len() {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            got: if mu_hat.len() != mu.len() {
                mu_hat.len()
            } else {
                counts.len()
            },
        });
    }
    Ok(ave(mu_hat
        .iter()
        .zip(mu)
        .zip(counts)
        .map(|((a, b), &c)| c as f64 * (a - b) * (a - b))))
}

/// `p` standard normal deviates from replicate `stream` of `seed`.
pub fn normal_deviates(seed: u64, stream: u64, p: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..p).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// The ellipsoid `{ξ : ave(a ξ²) <= σ² r}`, with `a` nondecreasing from 1.
/// Infinite entries pin the matching coordinates to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec {
    a: Vec<f64>,
    r: f64,
    sigma2: f64,
}

impl EllipsoidSpec {
    pub fn new(a: Vec<f64>, r: f64, sigma2: f64) -> Result<Self> {
        if a.first() != Some(&1.0) {
            return Err(Error::InvalidConfig("ellipsoid weights must start at 1"));
        }
        if a.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidConfig(
                "ellipsoid weights must be nondecreasing",
            ));
        }
        if !(r > 0.0 && r.is_finite()) || !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidConfig(
                "ellipsoid radius and variance must be positive",
            ));
        }
        Ok(Self { a, r, sigma2 })
    }

    /// `a_i = 1` for `i <= ⌊b p⌋`, infinite after.
    pub fn block(p: usize, b: f64, r: f64, sigma2: f64) -> Result<Self> {
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::InvalidConfig("block fraction must lie in (0, 1]"));
        }
        let k = libm::floor(b * p as f64 + 1e-9) as usize;
        let a = (0..p)
            .map(|i| if i < k { 1.0 } else { f64::INFINITY })
            .collect();
        Self::new(a, r, sigma2)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Fraction of unit weights.
    pub fn b(&self) -> f64 {
        self.a.iter().filter(|&&a| a == 1.0).count() as f64 / self.a.len() as f64
    }

    /// `ave(a ξ0²)`, with `a_i ξ0_i² = 0` where `a_i` is infinite.
    fn weighted_energy(&self, gamma: f64) -> f64 {
        ave(self
            .a
            .iter()
            .zip(self.xi0_sq(gamma))
            .map(|(&a, x)| if x == 0.0 { 0.0 } else { a * x }))
    }

    fn xi0_sq(&self, gamma: f64) -> impl Iterator<Item = f64> + '_ {
        self.a.iter().map(move |&a| {
            if a.is_infinite() {
                0.0
            } else {
                self.sigma2 * (libm::sqrt(gamma / a) - 1.0).max(0.0)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinskerSolution {
    pub gamma: f64,
    pub xi0_sq: Vec<f64>,
    pub bound: f64,
}

/// `ν_p = σ² ave[ξ0² / (σ² + ξ0²)]` with `ξ0² = σ² [(γ/a)^{1/2} - 1]_+` and
/// `γ` solving `ave(a ξ0²) = σ² r`, the boundary of the ellipsoid.
pub fn pinsker_bound(spec: &EllipsoidSpec) -> Result<f64> {
    pinsker_solution(spec).map(|s| s.bound)
}

pub fn pinsker_solution(spec: &EllipsoidSpec) -> Result<PinskerSolution> {
    let target = spec.sigma2 * spec.r;
    let excess = |gamma: f64| spec.weighted_energy(gamma) - target;

    // ave(a ξ0²) vanishes for γ <= 1 and grows without bound after.
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut doublings = 0;
    while excess(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(Error::BoundFailed);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let gamma = if libm::fabs(excess(lo)) < libm::fabs(excess(hi)) {
        lo
    } else {
        hi
    };
    if libm::fabs(excess(gamma)) > 1e-10 * target {
        return Err(Error::BoundFailed);
    }
    let xi0_sq: Vec<f64> = spec.xi0_sq(gamma).collect();
    let s2 = spec.sigma2;
    let bound = s2 * ave(xi0_sq.iter().map(|&x| x / (s2 + x)));
    Ok(PinskerSolution {
        gamma,
        xi0_sq,
        bound,
    })
}

/// `m1(x) = 2 - 50 ((x - 1/4)(x - 3/4))²`.
pub fn smooth_profile(x: f64) -> f64 {
    let inner = (x - 0.25) * (x - 0.75);
    2.0 - 50.0 * inner * inner
}

/// `m2(x) = m1(x) - sin(100 π x) / 4`.
pub fn very_wiggly_profile(x: f64) -> f64 {
    smooth_profile(x) - 0.25 * libm::sin(100.0 * core::f64::consts::PI * x)
}

/// `m1(i / p)` for `i = 1..=p`.
pub fn smooth_mean(p: usize) -> Vec<f64> {
    (1..=p)
        .map(|i| smooth_profile(i as f64 / p as f64))
        .collect()
}

/// `m2(i / p)` for `i = 1..=p`.
pub fn very_wiggly_mean(p: usize) -> Vec<f64> {
    (1..=p)
        .map(|i| very_wiggly_profile(i as f64 / p as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Smooth,
    VeryWiggly,
}

impl Scenario {
    pub fn mean(self, p: usize) -> Vec<f64> {
        match self {
            Self::Smooth => smooth_mean(p),
            Self::VeryWiggly => very_wiggly_mean(p),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Smooth => "smooth",
            Self::VeryWiggly => "very-wiggly",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "smooth" => Ok(Self::Smooth),
            "very-wiggly" | "very_wiggly" | "wiggly" => Ok(Self::VeryWiggly),
            _ => Err(Error::InvalidConfig(
                "scenario must be smooth or very-wiggly",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRow {
    pub family: Family,
    pub penalty: PenaltySelector,
    pub alpha: Option<f64>,
    pub estimated_risk: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub seed: u64,
    pub replicate: u64,
    pub sigma: f64,
    pub rows: Vec<SimulationRow>,
}

impl Simulation {
    pub fn row(&self, family: Family) -> Option<&SimulationRow> {
        self.rows.iter().find(|r| r.family == family)
    }
}

/// Reuses the penalty spectra of the unreplicated design with levels
/// `1..=p` across replicates.
#[derive(Debug, Clone)]
pub struct Simulator {
    mean: Vec<f64>,
    levels: Vec<f64>,
    candidates: Candidates,
    config: FitConfig,
}

impl Simulator {
    pub fn new(mean: Vec<f64>, config: FitConfig) -> Result<Self> {
        config.validate()?;
        let p = mean.len();
        if p < 2 {
            return Err(Error::DegenerateLayout);
        }
        let levels: Vec<f64> = (1..=p).map(|i| i as f64).collect();
        let candidates = Candidates::for_design(&levels, &alloc::vec![1; p], &config.penalties)?;
        Ok(Self {
            mean,
            levels,
            candidates,
            config,
        })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// `y = mean + σ e` with `e` from stream `replicate` of `seed`, then one
    /// adapted fit per family with its true loss.
    pub fn run(&self, sigma: f64, seed: u64, replicate: u64) -> Result<Simulation> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig("sigma must be nonnegative"));
        }
        let p = self.mean.len();
        let e = normal_deviates(seed, replicate, p);
        let y: Vec<f64> = self
            .mean
            .iter()
            .zip(&e)
            .map(|(m, e)| m + sigma * e)
            .collect();
        let groups = y.into_iter().map(|v| alloc::vec![v]).collect();
        let layout = Layout::new(self.levels.clone(), groups)?;
        let report = self.candidates.compare(&layout, &self.config)?;
        let ones = alloc::vec![1; p];
        let rows = report
            .rows
            .into_iter()
            .map(|r| {
                Ok(SimulationRow {
                    family: r.family,
                    penalty: r.penalty,
                    alpha: r.alpha,
                    estimated_risk: r.estimated_risk,
                    loss: loss(&r.mu_hat, &self.mean, &ones)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Simulation {
            seed,
            replicate,
            sigma,
            rows,
        })
    }
}

/// One draw of the artificial-data experiment on levels `1..=p`.
pub fn simulate_experiment(
    mean: &[f64],
    sigma: f64,
    seed: u64,
    config: &FitConfig,
) -> Result<Simulation> {
    Simulator::new(mean.to_vec(), config.clone())?.run(sigma, seed, 0)
}

/// A shrinkage rule that does not look at the data.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedRule {
    Shrink(Vec<f64>),
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SureCheck {
    pub reps: usize,
    pub mean_estimate: f64,
    pub mean_loss: f64,
    pub se_estimate: f64,
    pub se_loss: f64,
    /// Standard error of the mean of the paired differences.
    pub se_difference: f64,
}

impl SureCheck {
    /// `|mean estimate - mean loss|` in units of the paired standard error.
    pub fn z_score(&self) -> f64 {
        let gap = libm::fabs(self.mean_estimate - self.mean_loss);
        if gap == 0.0 {
            0.0
        } else {
            gap / self.se_difference
        }
    }
}

/// Monte Carlo mean of the risk estimate and of the loss of a fixed rule
/// under `z = ξ + σ e`.
pub fn sure_check(
    xi: &[f64],
    sigma2: f64,
    rule: &FixedRule,
    reps: usize,
    seed: u64,
) -> Result<SureCheck> {
    if reps < 100 {
        return Err(Error::InvalidConfig("at least 100 replicates are required"));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidConfig("variance must be nonnegative"));
    }
    if let FixedRule::Shrink(f) = rule {
        if f.len() != xi.len() {
            return Err(Error::LengthMismatch {
                expected: xi.len(),
                got: f.len(),
            });
        }
    }
    let sigma = libm::sqrt(sigma2);
    let mut est = Moments::default();
    let mut los = Moments::default();
    let mut diff = Moments::default();
    for k in 0..reps {
        let z: Vec<f64> = xi
            .iter()
            .zip(normal_deviates(seed, k as u64, xi.len()))
            .map(|(x, e)| x + sigma * e)
            .collect();
        let (estimate, f) = match rule {
            FixedRule::Shrink(f) => (ms_risk_estimate(f, &z, sigma2), f.clone()),
            FixedRule::Threshold(t) => (
                st_risk_estimate(*t, &z, sigma2),
                soft_threshold_factors(&z, *t),
            ),
        };
        let l = ave(f.iter().zip(&z).zip(xi).map(|((f, z), x)| {
            let d = f * z - x;
            d * d
        }));
        est.push(estimate);
        los.push(l);
        diff.push(estimate - l);
    }
    Ok(SureCheck {
        reps,
        mean_estimate: est.mean,
        mean_loss: los.mean,
        se_estimate: est.standard_error(),
        se_loss: los.standard_error(),
        se_difference: diff.standard_error(),
    })
}

/// Welford accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn standard_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        libm::sqrt(self.m2 / (self.n - 1) as f64 / self.n as f64)
    }
}

/// `Σ w_i (g_i - k_i)²`.
pub fn isotonic_objective(g: &[f64], w: &[f64], k: &[f64]) -> f64 {
    g.iter()
        .zip(w)
        .zip(k)
        .map(|((g, w), k)| w * (g - k) * (g - k))
        .sum()
}

pub const BRUTE_FORCE_MAX_LEN: usize = 8;

/// Minimizes `Σ w_i (g_i - k_i)²` over nonincreasing `k` whose entries lie on
/// the grid `min g, min g + step, ...` up to `max g`.
///
/// Runs a dynamic program over (coordinate, grid value), which visits every
/// nonincreasing grid vector implicitly and returns the exact grid optimum.
/// Ties go to the lexicographically largest vector.
pub fn brute_force_isotonic(g: &[f64], w: &[f64], step: f64) -> Result<Vec<f64>> {
    if g.len() > BRUTE_FORCE_MAX_LEN {
        return Err(Error::InstanceTooLarge {
            max: BRUTE_FORCE_MAX_LEN,
        });
    }
    if g.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            got: w.len(),
        });
    }
    if !(step > 0.0) {
        return Err(Error::InvalidConfig("grid step must be positive"));
    }
    if g.is_empty() {
        return Ok(Vec::new());
    }
    let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let steps = libm::floor((hi - lo) / step + 1e-9) as usize;
    if steps > 100_000 {
        return Err(Error::InstanceTooLarge {
            max: BRUTE_FORCE_MAX_LEN,
        });
    }
    let mut grid: Vec<f64> = (0..=steps).map(|k| lo + k as f64 * step).collect();
    if hi - grid[steps] > 1e-9 * step {
        grid.push(hi);
    }
    let m = grid.len();

    // best[v]: optimal cost of the prefix with its last entry at grid[v];
    // from[i][v]: the grid index of entry i - 1 achieving it.
    let cost = |i: usize, v: usize| w[i] * (g[i] - grid[v]) * (g[i] - grid[v]);
    let mut best: Vec<f64> = (0..m).map(|v| cost(0, v)).collect();
    let mut from: Vec<Vec<usize>> = Vec::with_capacity(g.len());
    for i in 1..g.len() {
        // Suffix minimum of best over indices >= v; ties keep the larger index.
        let mut suffix = alloc::vec![(0.0, 0usize); m];
        let mut run = (best[m - 1], m - 1);
        for v in (0..m).rev() {
            if best[v] < run.0 {
                run = (best[v], v);
            }
            suffix[v] = run;
        }
        from.push(suffix.iter().map(|s| s.1).collect());
        best = (0..m).map(|v| suffix[v].0 + cost(i, v)).collect();
    }
    let mut v = 0;
    for u in 1..m {
        if best[u] <= best[v] {
            v = u;
        }
    }
    let mut idx = alloc::vec![0; g.len()];
    idx[g.len() - 1] = v;
    for i in (1..g.len()).rev() {
        idx[i - 1] = from[i - 1][idx[i]];
    }
    Ok(idx.into_iter().map(|v| grid[v]).collect())
}
