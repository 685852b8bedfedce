//! Coordinate charts carrying a Riemannian metric.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::diff::{self, DiffConfig};
use crate::error::{GeometryError, Result};

/// Closed coordinate interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty interval [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_open(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn contains_closed(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Metric components together with their first and second coordinate partials.
///
/// Layouts: `g[i*n + j]`, `dg[(k*n + i)*n + j] = ∂_k g_ij`,
/// `ddg[((k*n + l)*n + i)*n + j] = ∂_k ∂_l g_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricJet {
    pub n: usize,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
    pub ddg: Vec<f64>,
}

impl MetricJet {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            g: vec![0.0; n * n],
            dg: vec![0.0; n * n * n],
            ddg: vec![0.0; n * n * n * n],
        }
    }

    #[inline]
    pub fn d(&self, k: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.dg[(k * n + i) * n + j]
    }

    #[inline]
    pub fn dd(&self, k: usize, l: usize, i: usize, j: usize) -> f64 {
        let n = self.n;
        self.ddg[((k * n + l) * n + i) * n + j]
    }
}

/// Source of metric components on a chart.
pub trait MetricModel: Send + Sync {
    /// Row-major `n×n` metric components at `x`.
    fn metric(&self, x: &[f64]) -> Vec<f64>;

    /// Analytic first and second partials, when the model has them.
    fn jet(&self, _x: &[f64]) -> Option<MetricJet> {
        None
    }
}

/// Which differentiation route the engine takes for metric partials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Registered analytic partials where available, finite differences otherwise.
    #[default]
    Analytic,
    /// Ignore registered partials and difference `metric_fn`.
    FiniteDifference,
}

/// A coordinate description of a Riemannian metric.
#[derive(Clone)]
pub struct Chart {
    coords: Vec<String>,
    domain: Vec<Interval>,
    margin: Vec<f64>,
    model: Arc<dyn MetricModel>,
    backend: Backend,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("coords", &self.coords)
            .field("domain", &self.domain)
            .field("margin", &self.margin)
            .field("backend", &self.backend)
            .finish()
    }
}

/// Default exclusion margin around singular loci, in chart units.
pub const DEFAULT_MARGIN: f64 = 0.05;

impl Chart {
    pub fn new(
        coords: Vec<String>,
        domain: Vec<Interval>,
        margin: Vec<f64>,
        model: Arc<dyn MetricModel>,
    ) -> Self {
        assert_eq!(coords.len(), domain.len());
        assert_eq!(coords.len(), margin.len());
        assert!(coords.len() >= 3, "charts need n >= 3");
        for (iv, &d) in domain.iter().zip(&margin) {
            assert!(d >= 0.0 && 2.0 * d < iv.width(), "margin swallows the domain");
        }
        Self {
            coords,
            domain,
            margin,
            model,
            backend: Backend::Analytic,
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn margin(&self) -> &[f64] {
        &self.margin
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn model(&self) -> &Arc<dyn MetricModel> {
        &self.model
    }

    /// The domain shrunk by the margin on both sides.
    pub fn sampling_region(&self) -> Vec<Interval> {
        self.domain
            .iter()
            .zip(&self.margin)
            .map(|(iv, &d)| Interval::new(iv.lo + d, iv.hi - d))
            .collect()
    }

    pub fn in_sampling_region(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .sampling_region()
                .iter()
                .zip(x)
                .all(|(iv, &xi)| iv.contains_closed(xi))
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.domain.iter().zip(x).all(|(iv, &xi)| iv.contains_open(xi))
    }

    pub(crate) fn require_domain(&self, x: &[f64]) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(GeometryError::PointOutOfDomain { point: x.to_vec() })
        }
    }

    /// Raw metric components, without domain or definiteness checks.
    pub fn metric_components(&self, x: &[f64]) -> Vec<f64> {
        self.model.metric(x)
    }

    /// Metric with first and second partials, from the analytic route when
    /// registered and selected, else by Richardson-extrapolated differences.
    pub fn metric_jet(&self, x: &[f64], cfg: &DiffConfig) -> Result<MetricJet> {
        if self.backend == Backend::Analytic {
            if let Some(jet) = self.model.jet(x) {
                return Ok(jet);
            }
        }
        let n = self.dim();
        let jet = diff::jet2(|y| Ok(self.model.metric(y)), x, &self.domain, cfg)?;
        let mut out = MetricJet::zeros(n);
        out.g = jet.value;
        for k in 0..n {
            for ij in 0..n * n {
                out.dg[k * n * n + ij] = jet.d1[k][ij];
            }
            for l in 0..n {
                for ij in 0..n * n {
                    out.ddg[(k * n + l) * n * n + ij] = jet.d2[k * n + l][ij];
                }
            }
        }
        Ok(out)
    }
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse(n: usize, g: &[f64], point: &[f64]) -> Result<Vec<f64>> {
    let m = DMatrix::from_row_slice(n, n, g);
    let chol = m
        .cholesky()
        .ok_or_else(|| GeometryError::SingularMetric { point: point.to_vec() })?;
    let inv = chol.inverse();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            // symmetrise; Cholesky inverse is symmetric up to rounding
            out[i * n + j] = 0.5 * (inv[(i, j)] + inv[(j, i)]);
        }
    }
    Ok(out)
}
