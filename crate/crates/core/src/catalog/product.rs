//! `S²(r_a) × S²(r_b)` in coordinates `(t, φ, u, ψ)`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::chart::{Chart, Interval, MetricJet, MetricModel, DEFAULT_MARGIN};
use crate::diff::ScalarField;

pub const DEFAULT_RADII: (f64, f64) = (1.0, std::f64::consts::FRAC_1_SQRT_2);

#[derive(Debug, Clone, Copy)]
pub struct ProductSpheres {
    pub ra: f64,
    pub rb: f64,
}

impl ProductSpheres {
    pub fn chart(self) -> Chart {
        Chart::new(
            vec!["t".into(), "phi".into(), "u".into(), "psi".into()],
            vec![
                Interval::new(0.0, PI),
                Interval::new(0.0, 2.0 * PI),
                Interval::new(0.0, PI),
                Interval::new(0.0, 2.0 * PI),
            ],
            vec![DEFAULT_MARGIN; 4],
            Arc::new(self),
        )
    }

    /// Scalar curvature `2/r_a² + 2/r_b²`.
    pub fn scalar_curvature(&self) -> f64 {
        2.0 / (self.ra * self.ra) + 2.0 / (self.rb * self.rb)
    }
}

impl MetricModel for ProductSpheres {
    fn metric(&self, x: &[f64]) -> Vec<f64> {
        let (a2, b2) = (self.ra * self.ra, self.rb * self.rb);
        let mut g = vec![0.0; 16];
        g[0] = a2;
        g[5] = a2 * x[0].sin().powi(2);
        g[10] = b2;
        g[15] = b2 * x[2].sin().powi(2);
        g
    }

    fn jet(&self, x: &[f64]) -> Option<MetricJet> {
        let (a2, b2) = (self.ra * self.ra, self.rb * self.rb);
        let mut jet = MetricJet::zeros(4);
        jet.g = self.metric(x);
        // ∂_t g_φφ, ∂_u g_ψψ and their second derivatives
        jet.dg[5] = a2 * (2.0 * x[0]).sin();
        jet.ddg[5] = 2.0 * a2 * (2.0 * x[0]).cos();
        jet.dg[2 * 16 + 15] = b2 * (2.0 * x[2]).sin();
        jet.ddg[(2 * 4 + 2) * 16 + 15] = 2.0 * b2 * (2.0 * x[2]).cos();
        Some(jet)
    }
}

/// `f = sin t · cos u`, a smooth test function mixing both factors.
pub fn product_test_function() -> ScalarField {
    ScalarField::new(|x| x[0].sin() * x[2].cos()).with_partials(
        |x| {
            let (st, ct, su, cu) = (x[0].sin(), x[0].cos(), x[2].sin(), x[2].cos());
            vec![ct * cu, 0.0, -st * su, 0.0]
        },
        |x| {
            let (st, ct, su, cu) = (x[0].sin(), x[0].cos(), x[2].sin(), x[2].cos());
            let mut h = vec![0.0; 16];
            h[0] = -st * cu;
            h[2] = -ct * su;
            h[8] = -ct * su;
            h[10] = -st * cu;
            h
        },
    )
}
