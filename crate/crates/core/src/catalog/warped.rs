//! Warped products `g = A(t) dt² + B(t)² g_{S^{n−1}}` in hyperspherical fiber
//! coordinates, with analytic metric jets and closed-form curvature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::chart::{Chart, Interval, MetricJet, MetricModel, DEFAULT_MARGIN};
use crate::error::{GeometryError, Result};

/// Radial profile: `A(t)` and `B(t)` with their first two derivatives.
pub trait WarpedProfile: Send + Sync + fmt::Debug {
    /// `[A, A', A'']`; arclength parameterizations keep the default.
    fn a(&self, _t: f64) -> [f64; 3] {
        [1.0, 0.0, 0.0]
    }

    /// `[B, B', B'']`
    fn b(&self, t: f64) -> [f64; 3];
}

/// A profile already in arclength, given by `h(t)` and its derivatives.
pub struct Arclength<F>(pub F);

impl<F> fmt::Debug for Arclength<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Arclength(..)")
    }
}

impl<F: Fn(f64) -> [f64; 3] + Send + Sync> WarpedProfile for Arclength<F> {
    fn b(&self, t: f64) -> [f64; 3] {
        (self.0)(t)
    }
}

/// `1 − 2m t^{2−n} − t²` and its first two derivatives.
pub fn schwarzschild_v(n: usize, m: f64, t: f64) -> [f64; 3] {
    let nf = n as f64;
    let p = t.powf(2.0 - nf);
    [
        1.0 - 2.0 * m * p - t * t,
        2.0 * m * (nf - 2.0) * p / t - 2.0 * t,
        -2.0 * m * (nf - 2.0) * (nf - 1.0) * p / (t * t) - 2.0,
    ]
}

#[derive(Debug, Clone, Copy)]
pub struct SchwarzschildProfile {
    pub n: usize,
    pub m: f64,
}

impl WarpedProfile for SchwarzschildProfile {
    fn a(&self, t: f64) -> [f64; 3] {
        let [v, v1, v2] = schwarzschild_v(self.n, self.m, t);
        [1.0 / v, -v1 / (v * v), -v2 / (v * v) + 2.0 * v1 * v1 / (v * v * v)]
    }

    fn b(&self, t: f64) -> [f64; 3] {
        [t, 1.0, 0.0]
    }
}

/// `Π_{1≤i<k} sin² x_i`, the angular factor of `g_kk`.
fn angular(x: &[f64], k: usize) -> f64 {
    (1..k).map(|i| x[i].sin().powi(2)).product()
}

/// The warped-product metric on `(t, θ_1, …, θ_{n−2}, φ)`.
#[derive(Debug, Clone)]
pub struct WarpedModel {
    n: usize,
    profile: Arc<dyn WarpedProfile>,
}

impl WarpedModel {
    pub fn new(n: usize, profile: Arc<dyn WarpedProfile>) -> Self {
        assert!(n >= 2);
        Self { n, profile }
    }

    pub fn profile(&self) -> &Arc<dyn WarpedProfile> {
        &self.profile
    }

    /// The chart over `t ∈ (t_lo, t_hi)` with the usual angular ranges.
    pub fn chart(n: usize, profile: Arc<dyn WarpedProfile>, t_range: Interval, t_margin: f64) -> Chart {
        let mut coords = vec!["t".to_string()];
        let mut domain = vec![t_range];
        let mut margin = vec![t_margin];
        for k in 1..n - 1 {
            coords.push(format!("theta{k}"));
            domain.push(Interval::new(0.0, PI));
            margin.push(DEFAULT_MARGIN);
        }
        coords.push("phi".to_string());
        domain.push(Interval::new(0.0, 2.0 * PI));
        margin.push(DEFAULT_MARGIN);
        Chart::new(coords, domain, margin, Arc::new(Self::new(n, profile)))
    }

    /// Angular factor with the entries `skip` differentiated: each
    /// differentiated `sin² x` becomes `sin 2x` (once) or `2 cos 2x` (twice).
    fn angular_derivative(&self, x: &[f64], k: usize, skip: &[usize]) -> f64 {
        let mut p = 1.0;
        for i in 1..k {
            let times = skip.iter().filter(|&&s| s == i).count();
            p *= match times {
                0 => x[i].sin().powi(2),
                1 => (2.0 * x[i]).sin(),
                _ => 2.0 * (2.0 * x[i]).cos(),
            };
        }
        p
    }
}

impl MetricModel for WarpedModel {
    fn metric(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut g = vec![0.0; n * n];
        g[0] = self.profile.a(x[0])[0];
        let b = self.profile.b(x[0])[0];
        for k in 1..n {
            g[k * n + k] = b * b * angular(x, k);
        }
        g
    }

    fn jet(&self, x: &[f64]) -> Option<MetricJet> {
        let n = self.n;
        let mut jet = MetricJet::zeros(n);
        let [a, a1, a2] = self.profile.a(x[0]);
        let [b, b1, b2] = self.profile.b(x[0]);
        let nn = n * n;
        jet.g[0] = a;
        jet.dg[0] = a1;
        jet.ddg[0] = a2;
        let bb = b * b;
        let bb1 = 2.0 * b * b1;
        let bb2 = 2.0 * (b1 * b1 + b * b2);
        for k in 1..n {
            let kk = k * n + k;
            let s = angular(x, k);
            jet.g[kk] = bb * s;
            jet.dg[kk] = bb1 * s;
            jet.ddg[kk] = bb2 * s;
            for p in 1..k {
                let sp = self.angular_derivative(x, k, &[p]);
                jet.dg[p * nn + kk] = bb * sp;
                jet.ddg[p * nn * n + kk] = bb1 * sp;
                jet.ddg[p * nn + kk] = bb1 * sp;
                for q in 1..k {
                    jet.ddg[(p * n + q) * nn + kk] = bb * self.angular_derivative(x, k, &[p, q]);
                }
            }
        }
        Some(jet)
    }
}

/// Closed-form curvature of a warped product at a point.
#[derive(Debug, Clone)]
pub struct WarpedCurvature {
    pub n: usize,
    /// Sectional curvature of planes containing the radial direction.
    pub k_radial: f64,
    /// Sectional curvature of fiber planes.
    pub k_fiber: f64,
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
}

/// Curvature of `A dt² + B² g_{S^{n−1}}` from the arclength warp
/// `h = B`, `h' = B'/√A`, `h'' = B''/A − B'A'/(2A²)`:
/// `K_rad = −h''/h`, `K_fib = (1 − h'²)/h²`.
pub fn warped_curvature(profile: &dyn WarpedProfile, point: &[f64], n: usize) -> Result<WarpedCurvature> {
    let t = point[0];
    let [a, a1, _] = profile.a(t);
    let [b, b1, b2] = profile.b(t);
    if !(b > 0.0) {
        return Err(GeometryError::NonpositiveWarp { t, value: b });
    }
    if !(a > 0.0) {
        return Err(GeometryError::NonpositiveWarp { t, value: a });
    }
    let h1 = b1 / a.sqrt();
    let h2 = b2 / a - b1 * a1 / (2.0 * a * a);
    let k_radial = -h2 / b;
    let k_fiber = (1.0 - h1 * h1) / (b * b);
    let mut g = vec![0.0; n * n];
    g[0] = a;
    for k in 1..n {
        g[k * n + k] = b * b * angular(point, k);
    }
    let sect = |i: usize, j: usize| if i == 0 || j == 0 { k_radial } else { k_fiber };
    let mut riemann = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let v = sect(i, j) * g[i * n + i] * g[j * n + j];
            riemann[((i * n + j) * n + i) * n + j] = v;
            riemann[((i * n + j) * n + j) * n + i] = -v;
        }
    }
    let nf = n as f64;
    let mut ricci = vec![0.0; n * n];
    ricci[0] = (nf - 1.0) * k_radial * g[0];
    for k in 1..n {
        ricci[k * n + k] = (k_radial + (nf - 2.0) * k_fiber) * g[k * n + k];
    }
    let scalar = 2.0 * (nf - 1.0) * k_radial + (nf - 1.0) * (nf - 2.0) * k_fiber;
    Ok(WarpedCurvature {
        n,
        k_radial,
        k_fiber,
        riemann,
        ricci,
        scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::DiffConfig;

    #[test]
    fn analytic_jet_matches_differences() {
        let model = WarpedModel::new(4, Arc::new(SchwarzschildProfile { n: 4, m: 0.05 }));
        let chart = Chart::new(
            vec!["t".into(), "a".into(), "b".into(), "c".into()],
            vec![
                Interval::new(0.4, 0.9),
                Interval::new(0.0, PI),
                Interval::new(0.0, PI),
                Interval::new(0.0, 2.0 * PI),
            ],
            vec![0.05; 4],
            Arc::new(model.clone()),
        );
        let x = [0.6, 1.1, 0.7, 2.0];
        let exact = model.jet(&x).unwrap();
        let fd = chart
            .clone()
            .with_backend(crate::chart::Backend::FiniteDifference)
            .metric_jet(&x, &DiffConfig::default())
            .unwrap();
        for (a, b) in exact.dg.iter().zip(&fd.dg) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        for (a, b) in exact.ddg.iter().zip(&fd.ddg) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn sphere_profile_has_unit_curvature() {
        let w = warped_curvature(&Arclength(|t: f64| [t.sin(), t.cos(), -t.sin()]), &[0.7, 1.0, 2.0], 3).unwrap();
        assert!((w.k_radial - 1.0).abs() < 1e-14);
        assert!((w.k_fiber - 1.0).abs() < 1e-14);
        assert!((w.scalar - 6.0).abs() < 1e-13);
    }

    #[test]
    fn constant_warp_is_a_product() {
        let h = 0.5f64;
        let w = warped_curvature(&Arclength(move |_| [h, 0.0, 0.0]), &[0.3, 1.0, 1.0, 1.0], 4).unwrap();
        assert_eq!(w.k_radial, 0.0);
        assert!((w.k_fiber - 4.0).abs() < 1e-14);
    }

    #[test]
    fn nonpositive_warp_rejected() {
        let err = warped_curvature(&Arclength(|t: f64| [t, 1.0, 0.0]), &[-0.1, 1.0, 1.0], 3).unwrap_err();
        assert!(matches!(err, GeometryError::NonpositiveWarp { .. }));
    }
}
