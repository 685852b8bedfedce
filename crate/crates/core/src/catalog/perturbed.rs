//! Seeded trigonometric perturbations of the flat metric,
//! `g_ij = δ_ij + a Σ_k c^{ij}_k sin(x_k + φ^{ij}_k)`.
//!
//! Coefficients are drawn from SplitMix64 for `i ≤ j` in row-major order and
//! `k = 0..n`, two draws per term: `c = 2u − 1`, then `φ = 2πu`, where
//! `u = (next_u64 >> 11) · 2⁻⁵³`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::chart::{Chart, Interval, MetricJet, MetricModel, DEFAULT_MARGIN};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_AMPLITUDE: f64 = 0.05;

/// Uniform draw in `[0, 1)` with 53 random bits.
pub fn unit_draw(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct PerturbedFlat {
    n: usize,
    amplitude: f64,
    /// `coef[(i*n + j)*n + k] = (c, φ)`, mirrored for `i > j`.
    coef: Vec<(f64, f64)>,
}

impl PerturbedFlat {
    pub fn new(n: usize, seed: u64, amplitude: f64) -> Self {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let mut coef = vec![(0.0, 0.0); n * n * n];
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let c = 2.0 * unit_draw(&mut rng) - 1.0;
                    let phi = 2.0 * PI * unit_draw(&mut rng);
                    coef[(i * n + j) * n + k] = (c, phi);
                    coef[(j * n + i) * n + k] = (c, phi);
                }
            }
        }
        Self { n, amplitude, coef }
    }

    /// The chart on `(0, 2π)ⁿ` with the default margin.
    pub fn chart(self) -> Chart {
        let n = self.n;
        Chart::new(
            (1..=n).map(|k| format!("x{k}")).collect(),
            vec![Interval::new(0.0, 2.0 * PI); n],
            vec![DEFAULT_MARGIN; n],
            Arc::new(self),
        )
    }
}

impl MetricModel for PerturbedFlat {
    fn metric(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n * n];
        for ij in 0..n * n {
            let mut s = 0.0;
            for (k, xk) in x.iter().enumerate() {
                let (c, phi) = self.coef[ij * n + k];
                s += c * (xk + phi).sin();
            }
            g[ij] = self.amplitude * s;
        }
        for i in 0..n {
            g[i * n + i] += 1.0;
        }
        g
    }

    fn jet(&self, x: &[f64]) -> Option<MetricJet> {
        let n = self.n;
        let nn = n * n;
        let mut jet = MetricJet::zeros(n);
        jet.g = self.metric(x);
        for ij in 0..nn {
            for (k, xk) in x.iter().enumerate() {
                let (c, phi) = self.coef[ij * n + k];
                jet.dg[k * nn + ij] = self.amplitude * c * (xk + phi).cos();
                jet.ddg[(k * n + k) * nn + ij] = -self.amplitude * c * (xk + phi).sin();
            }
        }
        Some(jet)
    }
}
