//! Banded penalty matrices that annihilate low-degree polynomials.
//!
//! Row `i` of a degree-`d` penalty is supported on columns `i..=i+d`, so a
//! `(p - d) x p` matrix is stored as `p - d` bands of `d + 1` coefficients.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    Difference,
    Annihilator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyMatrix {
    columns: usize,
    degree: usize,
    kind: PenaltyKind,
    bands: Vec<f64>,
    levels_hash: Option<u64>,
}

impl PenaltyMatrix {
    pub fn kind(&self) -> PenaltyKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn nrows(&self) -> usize {
        self.columns - self.degree
    }

    pub fn ncols(&self) -> usize {
        self.columns
    }

    /// Identifier of the level grid an annihilator was built on.
    pub fn levels_hash(&self) -> Option<u64> {
        self.levels_hash
    }

    /// Nonzero coefficients of row `i`, which start at column `i`.
    pub fn band(&self, i: usize) -> &[f64] {
        let w = self.degree + 1;
        &self.bands[i * w..(i + 1) * w]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j < i || j > i + self.degree {
            0.0
        } else {
            self.band(i)[j - i]
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.nrows())
            .map(|i| (0..self.columns).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.nrows())
            .map(|i| self.band(i).iter().zip(&v[i..]).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `D'D` as a dense row-major `p x p` matrix.
    pub fn gram(&self) -> Vec<f64> {
        let p = self.columns;
        let mut g = alloc::vec![0.0; p * p];
        for i in 0..self.nrows() {
            let band = self.band(i);
            for (a, &x) in band.iter().enumerate() {
                for (b, &y) in band.iter().enumerate() {
                    g[(i + a) * p + i + b] += x * y;
                }
            }
        }
        g
    }
}

/// `d`-th difference operator: `D_1 = Δ(p)`, `D_d = Δ(p - d + 1) D_{d-1}`.
pub fn difference_matrix(p: usize, d: usize) -> Result<PenaltyMatrix> {
    check_degree(p, d)?;
    // Composing with Δ maps band c to c[k] - c[k - 1].
    let mut band = alloc::vec![1.0];
    for _ in 0..d {
        let mut next = alloc::vec![0.0; band.len() + 1];
        for (k, &c) in band.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c;
        }
        band = next;
    }
    let bands = core::iter::repeat(band).take(p - d).flatten().collect();
    Ok(PenaltyMatrix {
        columns: p,
        degree: d,
        kind: PenaltyKind::Difference,
        bands,
        levels_hash: None,
    })
}

/// Local polynomial annihilator: row `i` holds the degree-`d` member of the
/// orthonormal polynomial basis on the window `s_i, ..., s_{i+d}`, with its
/// last entry positive.
pub fn local_annihilator(levels: &[f64], d: usize) -> Result<PenaltyMatrix> {
    let p = levels.len();
    check_degree(p, d)?;
    if levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::UnorderedLevels);
    }
    let mut bands = Vec::with_capacity((p - d) * (d + 1));
    for window in levels.windows(d + 1) {
        bands.extend(top_window_polynomial(window));
    }
    Ok(PenaltyMatrix {
        columns: p,
        degree: d,
        kind: PenaltyKind::Annihilator,
        bands,
        levels_hash: Some(levels_hash(levels)),
    })
}

/// Modified Gram-Schmidt on `1, x, ..., x^d` over the window, in centered and
/// scaled coordinates, with a second orthogonalization pass.
fn top_window_polynomial(window: &[f64]) -> Vec<f64> {
    let m = window.len();
    let center = window.iter().sum::<f64>() / m as f64;
    let half_range = 0.5 * (window[m - 1] - window[0]);
    let x: Vec<f64> = window.iter().map(|s| (s - center) / half_range).collect();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut power = alloc::vec![1.0; m];
    for _ in 0..m {
        let mut w = power.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= proj * qi;
                }
            }
        }
        let norm = libm::sqrt(dot(&w, &w));
        for wi in &mut w {
            *wi /= norm;
        }
        basis.push(w);
        for (pw, xi) in power.iter_mut().zip(&x) {
            *pw *= xi;
        }
    }
    let mut top = basis.pop().unwrap();
    if top[m - 1] < 0.0 {
        for v in &mut top {
            *v = -*v;
        }
    }
    top
}

fn check_degree(p: usize, d: usize) -> Result<()> {
    if d == 0 || d >= p {
        Err(Error::InvalidDegree {
            degree: d,
            levels: p,
        })
    } else {
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// FNV-1a over the bit patterns of the levels.
pub fn levels_hash(levels: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for s in levels {
        for byte in s.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Largest of `|D s^k| / max(1, |s^k|)` over `0 <= k < d`.
pub fn annihilation_residual(pm: &PenaltyMatrix, levels: &[f64]) -> f64 {
    let mut power = alloc::vec![1.0; levels.len()];
    let mut worst: f64 = 0.0;
    for _ in 0..pm.degree() {
        let image = pm.apply(&power);
        let num = libm::sqrt(dot(&image, &image));
        let den = libm::sqrt(dot(&power, &power)).max(1.0);
        worst = worst.max(num / den);
        for (pw, s) in power.iter_mut().zip(levels) {
            *pw *= s;
        }
    }
    worst
}

/// True when consecutive gaps agree to within `1e-9` relative.
pub fn is_equally_spaced(levels: &[f64]) -> bool {
    if levels.len() < 3 {
        return true;
    }
    let mean_gap = (levels[levels.len() - 1] - levels[0]) / (levels.len() - 1) as f64;
    levels
        .windows(2)
        .all(|w| libm::fabs((w[1] - w[0]) - mean_gap) <= 1e-9 * libm::fabs(mean_gap))
}

/// A penalty choice as written on the command line: `d1`..`d6` or `a1`..`a6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltySelector {
    Difference(usize),
    Annihilator(usize),
}

impl PenaltySelector {
    pub const MAX_DEGREE: usize = 6;

    pub fn degree(self) -> usize {
        match self {
            Self::Difference(d) | Self::Annihilator(d) => d,
        }
    }

    pub fn build(self, levels: &[f64]) -> Result<PenaltyMatrix> {
        match self {
            Self::Difference(d) => difference_matrix(levels.len(), d),
            Self::Annihilator(d) => local_annihilator(levels, d),
        }
    }

    /// `d1..d6`.
    pub fn differences() -> Vec<Self> {
        (1..=Self::MAX_DEGREE).map(Self::Difference).collect()
    }

    /// `a1..a6`.
    pub fn annihilators() -> Vec<Self> {
        (1..=Self::MAX_DEGREE).map(Self::Annihilator).collect()
    }
}

impl fmt::Display for PenaltySelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Difference(d) => write!(f, "d{d}"),
            Self::Annihilator(d) => write!(f, "a{d}"),
        }
    }
}

impl FromStr for PenaltySelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower: String = s.trim().to_ascii_lowercase();
        let (tag, digits) = lower.split_at(lower.len().min(1));
        let d: usize = digits
            .parse()
            .map_err(|_| Error::InvalidConfig("penalty selector must look like d4 or a2"))?;
        if !(1..=Self::MAX_DEGREE).contains(&d) {
            return Err(Error::InvalidConfig(
                "penalty degree must be between 1 and 6",
            ));
        }
        match tag {
            "d" => Ok(Self::Difference(d)),
            "a" => Ok(Self::Annihilator(d)),
            _ => Err(Error::InvalidConfig(
                "penalty selector must look like d4 or a2",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    const SQRT_HALF: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Normalized divided-difference weights `1 / prod_{m != j}(s_j - s_m)`,
    /// the closed form of the top orthonormal polynomial on `d + 1` points.
    fn divided_difference_row(window: &[f64]) -> Vec<f64> {
        let mut w: Vec<f64> = (0..window.len())
            .map(|j| {
                let prod: f64 = (0..window.len())
                    .filter(|&m| m != j)
                    .map(|m| window[j] - window[m])
                    .product();
                1.0 / prod
            })
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        w
    }

    #[test]
    fn first_difference() {
        let d = difference_matrix(4, 1).unwrap();
        assert_eq!(
            d.to_dense(),
            vec![
                vec![1.0, -1.0, 0.0, 0.0],
                vec![0.0, 1.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0, -1.0]
            ]
        );
    }

    #[test]
    fn second_difference() {
        let d = difference_matrix(4, 2).unwrap();
        assert_eq!(
            d.to_dense(),
            vec![vec![1.0, -2.0, 1.0, 0.0], vec![0.0, 1.0, -2.0, 1.0]]
        );
    }

    #[test]
    fn degree_bounds() {
        assert_eq!(
            difference_matrix(3, 3),
            Err(Error::InvalidDegree {
                degree: 3,
                levels: 3
            })
        );
        assert!(difference_matrix(3, 0).is_err());
        assert!(local_annihilator(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn annihilator_rejects_unordered_levels() {
        assert_eq!(
            local_annihilator(&[1.0, 3.0, 2.0], 1),
            Err(Error::UnorderedLevels)
        );
    }

    #[test]
    fn annihilator_first_degree_rows() {
        for levels in [[1.0, 2.0, 3.0], [0.0, 1.0, 10.0]] {
            let a = local_annihilator(&levels, 1).unwrap();
            let rows = a.to_dense();
            assert!(close(&rows[0], &[-SQRT_HALF, SQRT_HALF, 0.0], 1e-15));
            assert!(close(&rows[1], &[0.0, -SQRT_HALF, SQRT_HALF], 1e-15));
        }
    }

    #[test]
    fn annihilator_matches_divided_differences() {
        let levels = [0.3, 1.1, 1.7, 4.0, 4.2, 7.9, 8.0, 13.5];
        for d in 1..=5 {
            let a = local_annihilator(&levels, d).unwrap();
            for i in 0..a.nrows() {
                let mut expect = divided_difference_row(&levels[i..=i + d]);
                if expect[d] < 0.0 {
                    expect.iter_mut().for_each(|x| *x = -*x);
                }
                assert!(close(a.band(i), &expect, 1e-12), "d={d} row={i}");
            }
        }
    }

    #[test]
    fn annihilator_is_scaled_difference_on_equal_spacing() {
        let levels: Vec<f64> = (0..12).map(|i| 2.5 + 0.75 * i as f64).collect();
        for d in 1..=6 {
            let a = local_annihilator(&levels, d).unwrap();
            let dm = difference_matrix(levels.len(), d).unwrap();
            for i in 0..a.nrows() {
                let row = dm.band(i);
                let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                // Last entry of D_d is (-1)^d.
                let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
                let expect: Vec<f64> = row.iter().map(|x| sign * x / norm).collect();
                assert!(close(a.band(i), &expect, 1e-9));
            }
        }
    }

    #[test]
    fn residuals() {
        let s: Vec<f64> = (1..=5).map(f64::from).collect();
        assert_eq!(
            annihilation_residual(&difference_matrix(5, 2).unwrap(), &s),
            0.0
        );

        let uneven = [0.0, 1.0, 3.0, 4.0, 9.0];
        assert!(annihilation_residual(&difference_matrix(5, 2).unwrap(), &uneven) > 0.1);

        let levels = [-3.0, -2.2, 0.1, 0.4, 1.9, 2.0, 5.5, 6.1];
        let a = local_annihilator(&levels, 3).unwrap();
        assert!(annihilation_residual(&a, &levels) <= 1e-9);
    }

    #[test]
    fn unit_rows_and_bandwidth() {
        let levels = [0.0, 0.5, 2.0, 2.1, 3.0, 7.0];
        let a = local_annihilator(&levels, 2).unwrap();
        for (i, row) in a.to_dense().iter().enumerate() {
            let norm: f64 = row.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-14);
            for (j, &v) in row.iter().enumerate() {
                if j < i || j > i + 2 {
                    assert_eq!(v, 0.0);
                }
            }
        }
        assert_eq!(a.levels_hash(), Some(levels_hash(&levels)));
    }

    #[test]
    fn gram_matches_dense_product() {
        let d = difference_matrix(5, 2).unwrap();
        let dense = d.to_dense();
        let g = d.gram();
        for j in 0..5 {
            for k in 0..5 {
                let expect: f64 = dense.iter().map(|r| r[j] * r[k]).sum();
                assert_eq!(g[j * 5 + k], expect);
            }
        }
    }

    #[test]
    fn selector_grammar() {
        assert_eq!("d4".parse(), Ok(PenaltySelector::Difference(4)));
        assert_eq!("A2".parse(), Ok(PenaltySelector::Annihilator(2)));
        assert!("d0".parse::<PenaltySelector>().is_err());
        assert!("d7".parse::<PenaltySelector>().is_err());
        assert!("x3".parse::<PenaltySelector>().is_err());
        assert!("".parse::<PenaltySelector>().is_err());
        assert_eq!(PenaltySelector::Annihilator(6).to_string(), "a6");
    }

    #[test]
    fn spacing_detection() {
        assert!(is_equally_spaced(&[1.0, 2.0, 3.0, 4.0]));
        assert!(!is_equally_spaced(&[1.0, 2.0, 3.5]));
    }
}
