//! Dense tensor components at a point.
//!
//! Components are stored row-major with no symmetry compression; index `0` is
//! the slowest-varying slot. Every tensor carries its index variance and the
//! symmetries it claims, which [`TensorValue::declare`] verifies on entry.

use std::fmt;

use crate::error::{GeometryError, Result};

/// Whether an index slot is lowered or raised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
}

/// A pair symmetry claimed by a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// `T[..a..b..] = T[..b..a..]`
    Symmetric(usize, usize),
    /// `T[..a..b..] = -T[..b..a..]`
    Antisymmetric(usize, usize),
    /// `T[a b c d] = T[c d a b]` on a rank-4 tensor.
    PairExchange,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symmetry::Symmetric(a, b) => write!(f, "sym({a},{b})"),
            Symmetry::Antisymmetric(a, b) => write!(f, "antisym({a},{b})"),
            Symmetry::PairExchange => write!(f, "pair-exchange"),
        }
    }
}

/// Tolerance, relative to the largest component, for declared symmetries.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    dim: usize,
    variance: Vec<Variance>,
    components: Vec<f64>,
    symmetries: Vec<Symmetry>,
}

impl TensorValue {
    /// Builds a tensor without symmetry claims.
    pub fn new(dim: usize, variance: Vec<Variance>, components: Vec<f64>) -> Self {
        assert_eq!(
            components.len(),
            dim.pow(variance.len() as u32),
            "component count does not match dim^rank"
        );
        Self {
            dim,
            variance,
            components,
            symmetries: Vec::new(),
        }
    }

    /// Fully covariant tensor of the given rank.
    pub fn covariant(dim: usize, rank: usize, components: Vec<f64>) -> Self {
        Self::new(dim, vec![Variance::Covariant; rank], components)
    }

    pub fn scalar(value: f64) -> Self {
        Self::new(1, Vec::new(), vec![value])
    }

    /// Attaches symmetry claims, checking each one componentwise.
    pub fn declare(mut self, symmetries: &[Symmetry]) -> Result<Self> {
        let scale = self.max_abs().max(1.0);
        for &s in symmetries {
            let defect = self.symmetry_defect(s);
            if defect > SYMMETRY_TOL * scale {
                return Err(GeometryError::SymmetryViolation {
                    symmetry: s.to_string(),
                    defect,
                });
            }
        }
        self.symmetries.extend_from_slice(symmetries);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<f64> {
        self.components
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.rank());
        index.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.components[self.offset(index)]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.components)
    }

    /// Largest violation of `s` over all components.
    pub fn symmetry_defect(&self, s: Symmetry) -> f64 {
        let rank = self.rank();
        let mut idx = vec![0usize; rank];
        let mut worst = 0.0f64;
        for (flat, &v) in self.components.iter().enumerate() {
            unflatten(flat, self.dim, &mut idx);
            let (partner, sign) = match s {
                Symmetry::Symmetric(a, b) => {
                    idx.swap(a, b);
                    (self.offset(&idx), 1.0)
                }
                Symmetry::Antisymmetric(a, b) => {
                    idx.swap(a, b);
                    (self.offset(&idx), -1.0)
                }
                Symmetry::PairExchange => {
                    assert_eq!(rank, 4, "pair exchange needs rank 4");
                    let p = [idx[2], idx[3], idx[0], idx[1]];
                    (self.offset(&p), 1.0)
                }
            };
            worst = worst.max((v - sign * self.components[partner]).abs());
        }
        worst
    }
}

pub(crate) fn unflatten(mut flat: usize, dim: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

pub fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Full contraction `|T|^2 = g^{a a'} g^{b b'} ... T_{ab...} T_{a'b'...}` of a
/// covariant tensor against the inverse metric.
pub fn norm_sq(ginv: &[f64], n: usize, rank: usize, t: &[f64]) -> f64 {
    let raised = raise_all(ginv, n, rank, t);
    t.iter().zip(&raised).map(|(a, b)| a * b).sum()
}

/// Raises every index of a covariant tensor.
pub fn raise_all(ginv: &[f64], n: usize, rank: usize, t: &[f64]) -> Vec<f64> {
    let mut cur = t.to_vec();
    for slot in 0..rank {
        cur = raise_slot(ginv, n, rank, slot, &cur);
    }
    cur
}

/// Contracts slot `slot` of `t` with the inverse metric.
pub fn raise_slot(ginv: &[f64], n: usize, rank: usize, slot: usize, t: &[f64]) -> Vec<f64> {
    let stride = n.pow((rank - 1 - slot) as u32);
    let mut out = vec![0.0; t.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let i = (flat / stride) % n;
        let base = flat - i * stride;
        let mut acc = 0.0;
        for m in 0..n {
            acc += ginv[i * n + m] * t[base + m * stride];
        }
        *o = acc;
    }
    out
}

/// Matrix product of two n×n row-major matrices.
pub fn matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

pub fn trace(n: usize, a: &[f64]) -> f64 {
    (0..n).map(|i| a[i * n + i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn declared_symmetry_is_checked() {
        let t = TensorValue::covariant(2, 2, vec![1.0, 2.0, 2.0, 3.0]);
        assert!(t.clone().declare(&[Symmetry::Symmetric(0, 1)]).is_ok());
        let err = t.declare(&[Symmetry::Antisymmetric(0, 1)]).unwrap_err();
        assert!(matches!(err, GeometryError::SymmetryViolation { .. }));
    }

    #[test]
    fn offsets_are_row_major() {
        let t = TensorValue::covariant(3, 3, (0..27).map(f64::from).collect());
        assert_eq!(t.get(&[1, 2, 0]), 15.0);
        assert_eq!(t.get(&[2, 2, 2]), 26.0);
    }

    #[test]
    fn norm_against_diagonal_metric() {
        // g = diag(1, 4): |T|^2 for T = dx⊗dy equals g^{xx} g^{yy} = 1/4
        let ginv = [1.0, 0.0, 0.0, 0.25];
        let t = [0.0, 1.0, 0.0, 0.0];
        assert!((norm_sq(&ginv, 2, 2, &t) - 0.25).abs() < 1e-15);
    }
}
