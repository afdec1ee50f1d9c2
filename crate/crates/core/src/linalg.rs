//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.

use alloc::vec::Vec;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors.
///
/// `vectors` is row-major `n x n`; column `j` is the eigenvector for
/// `values[j]`. Each column is signed so that its first entry of largest
/// magnitude is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| self.vectors[i * n + j]).collect()
    }
}

/// Decomposes the symmetric row-major `n x n` matrix `a`.
pub fn symmetric_eigen(a: &[f64], n: usize) -> Result<SymmetricEigen> {
    if a.len() != n * n {
        return Err(Error::LengthMismatch {
            expected: n * n,
            got: a.len(),
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let scale = a
        .iter()
        .fold(0.0_f64, |m, x| m.max(libm::fabs(*x)))
        .max(1.0);
    for i in 0..n {
        for j in 0..i {
            if libm::fabs(a[i * n + j] - a[j * n + i]) > SYMMETRY_TOL * scale {
                return Err(Error::AsymmetricMatrix);
            }
        }
    }

    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    let mut v = alloc::vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    // Converged once the off-diagonal mass is below OFF_DIAGONAL_TOL ‖B‖_F.
    // Sweeping on until every remaining entry is negligible next to its two
    // diagonal entries costs a sweep or two and pins down eigenvalues far
    // below ‖B‖ (the penalty kernels) to near machine precision.
    let frobenius = libm::sqrt(m.iter().map(|x| x * x).sum::<f64>());
    let mut sweeps = 0;
    let mut converged = false;
    loop {
        let off = off_diagonal_ss(&m, n);
        converged |= libm::sqrt(off) <= OFF_DIAGONAL_TOL * frobenius;
        if off == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            if converged {
                break;
            }
            return Err(Error::EigensolverFailed { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, n, p, q, sweeps > 4 || converged);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x * n + x].total_cmp(&m[y * n + y]));
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let mut vectors = alloc::vec![0.0; n * n];
    for (j, &k) in order.iter().enumerate() {
        let mut lead = 0;
        for i in 1..n {
            if libm::fabs(v[i * n + k]) > libm::fabs(v[lead * n + k]) {
                lead = i;
            }
        }
        let sign = if v[lead * n + k] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[i * n + j] = sign * v[i * n + k];
        }
    }
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_ss(m: &[f64], n: usize) -> f64 {
    let mut ss = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                ss += m[i * n + j] * m[i * n + j];
            }
        }
    }
    ss
}

/// One Jacobi rotation zeroing `m[p][q]`, accumulated into `v`.
fn rotate(m: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize, late: bool) {
    let apq = m[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let g = 100.0 * libm::fabs(apq);
    // Negligible next to both diagonal entries: drop it outright.
    if late && libm::fabs(app) + g == libm::fabs(app) && libm::fabs(aqq) + g == libm::fabs(aqq) {
        m[p * n + q] = 0.0;
        m[q * n + p] = 0.0;
        return;
    }
    let theta = (aqq - app) / (2.0 * apq);
    let t = if libm::fabs(theta) > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let tau = s / (1.0 + c);

    m[p * n + p] = app - t * apq;
    m[q * n + q] = aqq + t * apq;
    m[p * n + q] = 0.0;
    m[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let g = m[r * n + p];
        let h = m[r * n + q];
        let new_p = g - s * (h + g * tau);
        let new_q = h + s * (g - h * tau);
        m[r * n + p] = new_p;
        m[p * n + r] = new_p;
        m[r * n + q] = new_q;
        m[q * n + r] = new_q;
    }
    for r in 0..n {
        let g = v[r * n + p];
        let h = v[r * n + q];
        v[r * n + p] = g - s * (h + g * tau);
        v[r * n + q] = h + s * (g - h * tau);
    }
}
