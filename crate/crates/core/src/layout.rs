//! The ordinal one-way layout and its least-squares baseline.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Observations grouped by factor level, levels in ascending order.
///
/// Observation order inside a group is the order rows were supplied in. Any
/// per-observation output (fitted values, residuals) follows the flattened
/// order: level by level, then within a level.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    levels: Vec<f64>,
    groups: Vec<Vec<f64>>,
}

/// Group means and the residual sum of squares of the saturated fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LsBaseline {
    pub group_means: Vec<f64>,
    pub residual_ss: f64,
    /// `residual_ss / (n - p)`, present only when `n > p`.
    pub sigma2_ls: Option<f64>,
}

impl Layout {
    /// Groups `(level, value)` rows by exact level equality.
    pub fn from_rows(rows: &[(f64, f64)]) -> Result<Self> {
        if rows.iter().any(|(s, y)| !s.is_finite() || !y.is_finite()) {
            return Err(Error::MalformedInput("non-finite level or value"));
        }
        let mut order: Vec<usize> = (0..rows.len()).collect();
        // Stable, so replicates keep their input order.
        order.sort_by(|&a, &b| rows[a].0.total_cmp(&rows[b].0));

        let mut levels: Vec<f64> = Vec::new();
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for i in order {
            let (s, y) = rows[i];
            match levels.last() {
                // -0.0 and 0.0 compare equal and land in one group.
                Some(&last) if last == s => groups.last_mut().unwrap().push(y),
                _ => {
                    levels.push(s);
                    groups.push(alloc::vec![y]);
                }
            }
        }
        Self::new(levels, groups)
    }

    /// Builds a layout from already grouped data.
    pub fn new(levels: Vec<f64>, groups: Vec<Vec<f64>>) -> Result<Self> {
        if levels.len() != groups.len() {
            return Err(Error::LengthMismatch {
                expected: levels.len(),
                got: groups.len(),
            });
        }
        if levels.len() < 2 {
            return Err(Error::DegenerateLayout);
        }
        if levels.iter().any(|s| !s.is_finite()) || groups.iter().flatten().any(|y| !y.is_finite())
        {
            return Err(Error::MalformedInput("non-finite level or value"));
        }
        if groups.iter().any(|g| g.is_empty()) {
            return Err(Error::MalformedInput(
                "every level needs at least one observation",
            ));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnorderedLevels);
        }
        Ok(Self { levels, groups })
    }

    /// One observation per level, levels `1, 2, ..., p`.
    pub fn from_sequence(values: &[f64]) -> Result<Self> {
        let levels = (1..=values.len()).map(|i| i as f64).collect();
        let groups = values.iter().map(|&y| alloc::vec![y]).collect();
        Self::new(levels, groups)
    }

    /// Same levels and replication, new responses (flattened order).
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: values.len(),
            });
        }
        let mut rest = values;
        let groups = self
            .groups
            .iter()
            .map(|g| {
                let (head, tail) = rest.split_at(g.len());
                rest = tail;
                head.to_vec()
            })
            .collect();
        Self::new(self.levels.clone(), groups)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    pub fn counts(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// Number of levels.
    pub fn p(&self) -> usize {
        self.levels.len()
    }

    /// Total number of observations.
    pub fn n(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_balanced(&self) -> bool {
        let first = self.groups[0].len();
        self.groups.iter().all(|g| g.len() == first)
    }

    /// Responses in flattened order.
    pub fn values(&self) -> Vec<f64> {
        self.groups.iter().flatten().copied().collect()
    }

    pub fn total_ss(&self) -> f64 {
        self.groups.iter().flatten().map(|y| y * y).sum()
    }

    /// Repeats a per-level vector over each level's observations.
    pub fn expand(&self, per_level: &[f64]) -> Vec<f64> {
        self.groups
            .iter()
            .zip(per_level)
            .flat_map(|(g, &m)| core::iter::repeat(m).take(g.len()))
            .collect()
    }

    pub fn ls_baseline(&self) -> LsBaseline {
        let group_means: Vec<f64> = self
            .groups
            .iter()
            .map(|g| g.iter().sum::<f64>() / g.len() as f64)
            .collect();
        let residual_ss = self
            .groups
            .iter()
            .zip(&group_means)
            .map(|(g, m)| g.iter().map(|y| (y - m) * (y - m)).sum::<f64>())
            .sum::<f64>();
        let (n, p) = (self.n(), self.p());
        let sigma2_ls = (n > p).then(|| residual_ss / (n - p) as f64);
        LsBaseline {
            group_means,
            residual_ss,
            sigma2_ls,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn groups_replicates_and_sorts_levels() {
        let layout = Layout::from_rows(&[(1.0, 2.0), (2.0, 4.0), (1.0, 0.0)]).unwrap();
        assert_eq!(layout.p(), 2);
        assert_eq!(layout.levels(), &[1.0, 2.0]);
        assert_eq!(layout.counts(), vec![2, 1]);
        assert_eq!(layout.groups(), &[vec![2.0, 0.0], vec![4.0]]);
        assert_eq!(layout.n(), 3);
    }

    #[test]
    fn single_level_is_degenerate() {
        assert_eq!(
            Layout::from_rows(&[(1.0, 1.0)]),
            Err(Error::DegenerateLayout)
        );
        assert_eq!(
            Layout::from_rows(&[(1.0, 1.0), (1.0, 3.0)]),
            Err(Error::DegenerateLayout)
        );
    }

    #[test]
    fn non_finite_rows_are_malformed() {
        assert!(matches!(
            Layout::from_rows(&[(1.0, f64::NAN), (2.0, 1.0)]),
            Err(Error::MalformedInput(_))
        ));
        assert!(matches!(
            Layout::from_rows(&[(f64::INFINITY, 0.0), (2.0, 1.0)]),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn monthly_series_is_saturated() {
        let rows: Vec<(f64, f64)> = (1..=142).map(|i| (i as f64, (i % 12) as f64)).collect();
        let layout = Layout::from_rows(&rows).unwrap();
        assert_eq!((layout.p(), layout.n()), (142, 142));
        assert!(layout.counts().iter().all(|&c| c == 1));
    }

    #[test]
    fn baseline_hand_example() {
        let layout = Layout::from_rows(&[(1.0, 2.0), (2.0, 4.0), (1.0, 0.0)]).unwrap();
        let ls = layout.ls_baseline();
        assert_eq!(ls.group_means, vec![1.0, 4.0]);
        assert_eq!(ls.residual_ss, 2.0);
        assert_eq!(ls.sigma2_ls, Some(2.0));
    }

    #[test]
    fn saturated_baseline_has_no_variance() {
        let layout = Layout::from_sequence(&[3.0, 1.0, 4.0]).unwrap();
        let ls = layout.ls_baseline();
        assert_eq!(ls.residual_ss, 0.0);
        assert_eq!(ls.sigma2_ls, None);
    }

    #[test]
    fn constant_groups_have_zero_residual() {
        let layout = Layout::new(vec![0.0, 1.0], vec![vec![5.0; 3], vec![-1.0; 4]]).unwrap();
        assert_eq!(layout.ls_baseline().residual_ss, 0.0);
    }

    #[test]
    fn with_values_keeps_structure() {
        let layout = Layout::new(vec![0.0, 1.0], vec![vec![1.0, 2.0], vec![3.0]]).unwrap();
        let other = layout.with_values(&[7.0, 8.0, 9.0]).unwrap();
        assert_eq!(other.groups(), &[vec![7.0, 8.0], vec![9.0]]);
        assert_eq!(layout.expand(&[1.5, 3.0]), vec![1.5, 1.5, 3.0]);
    }
}
