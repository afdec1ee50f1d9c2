//! Orthonormal penalty basis of the regression space.
//!
//! With replication matrix `R = diag(n_i)` and penalty `D`, the basis comes
//! from the spectral decomposition `R^{-1/2} D'D R^{-1/2} = Γ Λ Γ'` with
//! eigenvalues in ascending order. The basis vectors in observation space are
//! the columns of `X R^{-1/2} Γ`; they are never formed explicitly, since
//! everything reduces to the `p` group means.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::linalg::symmetric_eigen;
use crate::penalty::{levels_hash, PenaltyKind, PenaltyMatrix};

/// The data-independent half of a penalty basis: it depends only on the
/// level grid, the replication counts and the penalty matrix, so it can be
/// shared across any number of responses on the same design.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    rotation: Vec<f64>,
    counts: Vec<usize>,
    degree: usize,
}

impl Spectrum {
    pub fn new(levels: &[f64], counts: &[usize], pm: &PenaltyMatrix) -> Result<Self> {
        let p = counts.len();
        if levels.len() != p || pm.ncols() != p {
            return Err(Error::PenaltyLayoutMismatch(
                "column count differs from level count",
            ));
        }
        if pm.kind() == PenaltyKind::Annihilator && pm.levels_hash() != Some(levels_hash(levels)) {
            return Err(Error::PenaltyLayoutMismatch(
                "annihilator built on another level grid",
            ));
        }
        if counts.contains(&0) {
            return Err(Error::MalformedInput(
                "every level needs at least one observation",
            ));
        }
        let inv_root: Vec<f64> = counts.iter().map(|&c| 1.0 / libm::sqrt(c as f64)).collect();
        let mut b = pm.gram();
        for i in 0..p {
            for j in 0..p {
                b[i * p + j] *= inv_root[i] * inv_root[j];
            }
        }
        let eig = symmetric_eigen(&b, p)?;
        let eigenvalues = eig.values.iter().map(|&l| l.max(0.0)).collect();
        Ok(Self {
            eigenvalues,
            rotation: eig.vectors,
            counts: counts.to_vec(),
            degree: pm.degree(),
        })
    }

    pub fn p(&self) -> usize {
        self.counts.len()
    }

    /// Ascending, clamped at zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Row-major `p x p` eigenvector matrix Γ.
    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Degree of the penalty the spectrum was built from.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `z_j = Σ_i Γ_ij sqrt(n_i) ybar_i`.
    pub fn coefficients(&self, group_means: &[f64]) -> Vec<f64> {
        let p = self.p();
        let scaled: Vec<f64> = group_means
            .iter()
            .zip(&self.counts)
            .map(|(m, &c)| m * libm::sqrt(c as f64))
            .collect();
        let mut z = alloc::vec![0.0; p];
        for (i, &x) in scaled.iter().enumerate() {
            let row = &self.rotation[i * p..(i + 1) * p];
            for (zj, g) in z.iter_mut().zip(row) {
                *zj += g * x;
            }
        }
        z
    }

    /// Per-level means `R^{-1/2} Γ ξ`.
    pub fn level_means(&self, xi: &[f64]) -> Vec<f64> {
        let p = self.p();
        (0..p)
            .map(|i| {
                let row = &self.rotation[i * p..(i + 1) * p];
                let v: f64 = row.iter().zip(xi).map(|(g, x)| g * x).sum();
                v / libm::sqrt(self.counts[i] as f64)
            })
            .collect()
    }
}

/// Fitted means per level and per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub mu_hat: Vec<f64>,
    pub eta_hat: Vec<f64>,
}

/// A spectrum paired with the canonical coefficients of one response vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyBasis {
    spectrum: Arc<Spectrum>,
    z: Vec<f64>,
    residual_ss: f64,
    total_ss: f64,
    n: usize,
}

impl PenaltyBasis {
    pub fn build(layout: &Layout, pm: &PenaltyMatrix) -> Result<Self> {
        let spectrum = Spectrum::new(layout.levels(), &layout.counts(), pm)?;
        Self::from_spectrum(Arc::new(spectrum), layout)
    }

    pub fn from_spectrum(spectrum: Arc<Spectrum>, layout: &Layout) -> Result<Self> {
        if spectrum.counts() != layout.counts().as_slice() {
            return Err(Error::PenaltyLayoutMismatch("replication counts differ"));
        }
        let baseline = layout.ls_baseline();
        let z = spectrum.coefficients(&baseline.group_means);
        Ok(Self {
            spectrum,
            z,
            residual_ss: baseline.residual_ss,
            total_ss: layout.total_ss(),
            n: layout.n(),
        })
    }

    pub fn spectrum(&self) -> &Arc<Spectrum> {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        self.spectrum.eigenvalues()
    }

    pub fn rotation(&self) -> &[f64] {
        self.spectrum.rotation()
    }

    pub fn counts(&self) -> &[usize] {
        self.spectrum.counts()
    }

    /// Canonical coefficients `z = U'y`.
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// `|y - η_LS|²`, the energy outside the regression space.
    pub fn residual_ss(&self) -> f64 {
        self.residual_ss
    }

    /// `|y|²`.
    pub fn total_ss(&self) -> f64 {
        self.total_ss
    }

    pub fn p(&self) -> usize {
        self.z.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reconstruct(&self, xi_hat: &[f64]) -> Result<Reconstruction> {
        if xi_hat.len() != self.p() {
            return Err(Error::LengthMismatch {
                expected: self.p(),
                got: xi_hat.len(),
            });
        }
        let mu_hat = self.spectrum.level_means(xi_hat);
        let eta_hat = mu_hat
            .iter()
            .zip(self.counts())
            .flat_map(|(&m, &c)| core::iter::repeat(m).take(c))
            .collect();
        Ok(Reconstruction { mu_hat, eta_hat })
    }

    /// `(i, sgn(z_i) |z_i|^{1/2})` with 1-based `i`: the empirical basis
    /// economy profile.
    pub fn economy_profile(&self) -> Vec<(usize, f64)> {
        economy_profile(&self.z)
    }
}

pub fn economy_profile(z: &[f64]) -> Vec<(usize, f64)> {
    z.iter()
        .enumerate()
        .map(|(i, &v)| {
            let root = libm::sqrt(libm::fabs(v));
            (i + 1, if v < 0.0 { -root } else { root })
        })
        .collect()
}

/// `z` for `layout` in the basis, which must share its replication counts.
pub fn coefficients(basis: &PenaltyBasis, layout: &Layout) -> Result<Vec<f64>> {
    if basis.counts() != layout.counts().as_slice() {
        return Err(Error::PenaltyLayoutMismatch("replication counts differ"));
    }
    Ok(basis
        .spectrum
        .coefficients(&layout.ls_baseline().group_means))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penalty::{difference_matrix, local_annihilator};
    use alloc::vec;

    #[test]
    fn two_level_by_hand() {
        let layout = Layout::from_sequence(&[3.0, 1.0]).unwrap();
        let basis = PenaltyBasis::build(&layout, &difference_matrix(2, 1).unwrap()).unwrap();
        assert!(basis.eigenvalues()[0].abs() < 1e-15);
        assert!((basis.eigenvalues()[1] - 2.0).abs() < 1e-15);
        let r2 = core::f64::consts::SQRT_2;
        assert!((basis.z()[0] - 2.0 * r2).abs() < 1e-14);
        assert!((basis.z()[1] - r2).abs() < 1e-14);
    }

    #[test]
    fn unbalanced_two_level_matrix() {
        // B = diag(1/√2, 1) [[1,-1],[-1,1]] diag(1/√2, 1) = [[1/2, -1/√2], [-1/√2, 1]].
        // Trace 3/2, determinant 0.
        let layout = Layout::new(vec![0.0, 1.0], vec![vec![1.0, 2.0], vec![0.5]]).unwrap();
        let basis = PenaltyBasis::build(&layout, &difference_matrix(2, 1).unwrap()).unwrap();
        assert!(basis.eigenvalues()[0].abs() < 1e-15);
        assert!((basis.eigenvalues()[1] - 1.5).abs() < 1e-14);
        // Kernel of B is R^{1/2} times constants: (√2, 1)/√3.
        let g = basis.spectrum().rotation();
        assert!((g[0] - (2.0_f64 / 3.0).sqrt()).abs() < 1e-14);
        assert!((g[2] - (1.0_f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zero_response_zero_coefficients() {
        let layout = Layout::from_sequence(&[0.0; 6]).unwrap();
        let basis = PenaltyBasis::build(&layout, &difference_matrix(6, 2).unwrap()).unwrap();
        assert!(basis.z().iter().all(|&z| z == 0.0));
    }

    #[test]
    fn basis_column_maps_to_unit_coordinate() {
        let pm = difference_matrix(7, 2).unwrap();
        let probe = PenaltyBasis::build(&Layout::from_sequence(&[0.0; 7]).unwrap(), &pm).unwrap();
        for j in 0..7 {
            let column: Vec<f64> = (0..7).map(|i| probe.rotation()[i * 7 + j]).collect();
            let layout = Layout::from_sequence(&column).unwrap();
            let z = coefficients(&probe, &layout).unwrap();
            for (k, zk) in z.iter().enumerate() {
                let expect = if k == j { 1.0 } else { 0.0 };
                assert!((zk - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_identity() {
        let layout = Layout::new(
            vec![1.0, 2.0, 4.0, 5.0],
            vec![vec![1.0, 3.0], vec![2.0], vec![7.0, 8.0, 9.0], vec![0.0]],
        )
        .unwrap();
        let pm = local_annihilator(layout.levels(), 2).unwrap();
        let basis = PenaltyBasis::build(&layout, &pm).unwrap();
        let fit = basis.reconstruct(basis.z()).unwrap();
        let means = layout.ls_baseline().group_means;
        for (a, b) in fit.mu_hat.iter().zip(&means) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(fit.eta_hat.len(), layout.n());
        let zero = basis.reconstruct(&[0.0; 4]).unwrap();
        assert!(zero.mu_hat.iter().all(|&m| m == 0.0));
    }

    #[test]
    fn first_vector_of_first_difference_is_constant() {
        let p = 5;
        let layout = Layout::from_sequence(&[0.0; 5]).unwrap();
        let basis = PenaltyBasis::build(&layout, &difference_matrix(p, 1).unwrap()).unwrap();
        let mut e1 = vec![0.0; p];
        e1[0] = 1.0;
        let fit = basis.reconstruct(&e1).unwrap();
        let c = 1.0 / (p as f64).sqrt();
        assert!(fit.mu_hat.iter().all(|m| (m.abs() - c).abs() < 1e-12));
        assert!(fit.mu_hat.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-12));
    }

    #[test]
    fn economy_transform() {
        assert_eq!(
            economy_profile(&[4.0, -1.0, 0.0]),
            vec![(1, 2.0), (2, -1.0), (3, 0.0)]
        );
        assert!(economy_profile(&[0.0; 3]).iter().all(|&(_, v)| v == 0.0));
    }

    #[test]
    fn mismatched_penalty_rejected() {
        let layout = Layout::from_sequence(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            PenaltyBasis::build(&layout, &difference_matrix(4, 1).unwrap()),
            Err(Error::PenaltyLayoutMismatch(_))
        ));
        let other = local_annihilator(&[1.0, 2.0, 3.5], 1).unwrap();
        assert!(matches!(
            PenaltyBasis::build(&layout, &other),
            Err(Error::PenaltyLayoutMismatch(_))
        ));
    }
}
