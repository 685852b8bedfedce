//! Eigen-decomposition of a symmetric 2-tensor against the metric.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{GeometryError, Result};

/// Orthonormality tolerance for the eigenbasis.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Eigenvalues `λ_a` and a g-orthonormal eigenbasis `e_a` (contravariant
/// vectors) of `T_ij e^j = λ g_ij e^j`, sorted ascending.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    /// `basis[a]` is the component vector of `e_a`.
    pub basis: Vec<Vec<f64>>,
}

impl SpectralData {
    pub fn new(n: usize, g: &[f64], t: &[f64]) -> Result<Self> {
        let gm = DMatrix::from_row_slice(n, n, g);
        let chol = gm
            .clone()
            .cholesky()
            .ok_or_else(|| GeometryError::SingularMetric { point: Vec::new() })?;
        let l = chol.l();
        let linv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::SingularMetric { point: Vec::new() })?;
        let tm = DMatrix::from_row_slice(n, n, t);
        let mut m = &linv * tm * linv.transpose();
        m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lt_inv = linv.transpose();
        let mut eigenvalues = Vec::with_capacity(n);
        let mut basis = Vec::with_capacity(n);
        for &a in &order {
            eigenvalues.push(eig.eigenvalues[a]);
            let e = &lt_inv * eig.eigenvectors.column(a);
            basis.push(e.iter().copied().collect());
        }
        let out = Self { n, eigenvalues, basis };
        let defect = out.orthonormality_defect(g);
        if !(defect <= ORTHONORMALITY_TOL) {
            return Err(GeometryError::DegenerateEigenbasis { defect });
        }
        Ok(out)
    }

    /// `max |g(e_a, e_b) − δ_ab|`.
    pub fn orthonormality_defect(&self, g: &[f64]) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += g[i * n + j] * self.basis[a][i] * self.basis[b][j];
                    }
                }
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `Σ_a λ_a e♭_a ⊗ e♭_a`, which should reproduce `T`.
    pub fn reconstruct(&self, g: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for (lam, e) in self.eigenvalues.iter().zip(&self.basis) {
            let low: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| g[i * n + j] * e[j]).sum())
                .collect();
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] += lam * low[i] * low[j];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_against_diagonal_metric() {
        // T = diag(2, 12) against g = diag(1, 4): eigenvalues 2 and 3
        let s = SpectralData::new(2, &[1.0, 0.0, 0.0, 4.0], &[2.0, 0.0, 0.0, 12.0]).unwrap();
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!((s.basis[1][1].abs() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_of_coupled_tensor() {
        let g = [2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0];
        let t = [1.0, 0.5, 0.0, 0.5, -2.0, 0.7, 0.0, 0.7, 0.3];
        let s = SpectralData::new(3, &g, &t).unwrap();
        let r = s.reconstruct(&g);
        for (a, b) in r.iter().zip(&t) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.orthonormality_defect(&g) < 1e-12);
    }

    #[test]
    fn repeated_eigenvalues_still_orthonormal() {
        let g = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let s = SpectralData::new(3, &g, &g).unwrap();
        assert!(s.eigenvalues.iter().all(|l| (l - 1.0).abs() < 1e-14));
    }
}
