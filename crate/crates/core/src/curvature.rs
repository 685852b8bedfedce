//! Levi-Civita connection and curvature from metric jets.
//!
//! Sign convention: `R_{ijkl}` is normalised so that the unit round sphere has
//! `R_{ijij} = g_ii g_jj - g_ij²`, i.e. sectional curvature
//! `K(u, v) = R(u, v, u, v) / |u ∧ v|²`, and Ricci is the contraction of
//! slots 1 and 3: `R_{jl} = g^{ik} R_{ijkl}`. With this choice the Weyl
//! decomposition, the commutator identity
//! `[∇_i, ∇_j] R_{kl} = R_{ijks} R_{sl} + R_{ijls} R_{ks}` and the contracted
//! Bianchi identity `∇_i R_{ijkl} = ∇_k R_{jl} - ∇_l R_{jk}` all hold verbatim.

use crate::chart::{spd_inverse, Chart};
use crate::diff::DiffConfig;
use crate::error::{GeometryError, Result};
use crate::tensor::{matmul, trace, Symmetry, TensorValue, Variance};

/// Whether to also build `∂Γ`, needed for second covariant derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Curvature,
    WithConnectionDerivative,
}

/// Metric, connection and curvature at one point.
#[derive(Debug, Clone)]
pub struct PointCurvature {
    pub n: usize,
    pub point: Vec<f64>,
    pub g: Vec<f64>,
    pub ginv: Vec<f64>,
    /// `gamma[(k*n + i)*n + j] = Γ^k_ij`
    pub gamma: Vec<f64>,
    /// `dgamma[((l*n + k)*n + i)*n + j] = ∂_l Γ^k_ij`, when requested.
    pub dgamma: Option<Vec<f64>>,
    /// `riemann[((i*n + j)*n + k)*n + l] = R_ijkl`
    pub riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
}

impl PointCurvature {
    pub fn at(chart: &Chart, x: &[f64], cfg: &DiffConfig, depth: Depth) -> Result<Self> {
        chart.require_domain(x)?;
        let jet = chart.metric_jet(x, cfg)?;
        let n = jet.n;
        let ginv = spd_inverse(n, &jet.g, x)?;

        // first-kind symbols Γ_{m,ij} = ½(∂_i g_jm + ∂_j g_im − ∂_m g_ij)
        let mut first = vec![0.0; n * n * n];
        for m in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = 0.5 * (jet.d(i, j, m) + jet.d(j, i, m) - jet.d(m, i, j));
                    first[(m * n + i) * n + j] = v;
                    first[(m * n + j) * n + i] = v;
                }
            }
        }
        let mut gamma = vec![0.0; n * n * n];
        for k in 0..n {
            for m in 0..n {
                let gkm = ginv[k * n + m];
                if gkm == 0.0 {
                    continue;
                }
                for ij in 0..n * n {
                    gamma[k * n * n + ij] += gkm * first[m * n * n + ij];
                }
            }
        }

        // R_ijkl = ½(∂_j∂_k g_il + ∂_i∂_l g_jk − ∂_i∂_k g_jl − ∂_j∂_l g_ik)
        //          + Γ^m_jk Γ_{m,il} − Γ^m_jl Γ_{m,ik}
        let mut riemann = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        if k == l {
                            continue;
                        }
                        let mut v = 0.5
                            * (jet.dd(j, k, i, l) + jet.dd(i, l, j, k)
                                - jet.dd(i, k, j, l)
                                - jet.dd(j, l, i, k));
                        for m in 0..n {
                            v += gamma[(m * n + j) * n + k] * first[(m * n + i) * n + l]
                                - gamma[(m * n + j) * n + l] * first[(m * n + i) * n + k];
                        }
                        riemann[((i * n + j) * n + k) * n + l] = v;
                    }
                }
            }
        }

        let mut ricci = vec![0.0; n * n];
        for j in 0..n {
            for l in j..n {
                let mut v = 0.0;
                for i in 0..n {
                    for k in 0..n {
                        v += ginv[i * n + k] * riemann[((i * n + j) * n + k) * n + l];
                    }
                }
                ricci[j * n + l] = v;
                ricci[l * n + j] = v;
            }
        }
        let scalar = (0..n * n).map(|a| ginv[a] * ricci[a]).sum();

        let dgamma = match depth {
            Depth::Curvature => None,
            Depth::WithConnectionDerivative => Some(connection_derivative(&jet, &ginv, &gamma)),
        };

        Ok(Self {
            n,
            point: x.to_vec(),
            g: jet.g,
            ginv,
            gamma,
            dgamma,
            riemann,
            ricci,
            scalar,
        })
    }

    #[inline]
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    /// Traceless Ricci `R_ij − (R/n) g_ij`.
    pub fn traceless_ricci(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.ricci
            .iter()
            .zip(&self.g)
            .map(|(r, g)| r - self.scalar / n * g)
            .collect()
    }

    /// Mixed Ricci `A = g^{-1} Ric` as a row-major matrix.
    pub fn ricci_endomorphism(&self) -> Vec<f64> {
        matmul(self.n, &self.ginv, &self.ricci)
    }

    /// `|Ric|² = tr(A²)`.
    pub fn ricci_norm_sq(&self) -> f64 {
        let a = self.ricci_endomorphism();
        trace(self.n, &matmul(self.n, &a, &a))
    }

    /// Ricci with both indices raised.
    pub fn ricci_up(&self) -> Vec<f64> {
        let a = self.ricci_endomorphism();
        matmul(self.n, &a, &self.ginv)
    }

    /// `R(u, v, u, v) / (|u|²|v|² − ⟨u,v⟩²)`.
    pub fn sectional(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let n = self.n;
        let dot = |a: &[f64], b: &[f64]| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += self.g[i * n + j] * a[i] * b[j];
                }
            }
            s
        };
        let denom = dot(u, u) * dot(v, v) - dot(u, v).powi(2);
        if denom <= 1e-12 {
            return Err(GeometryError::DegeneratePlane { denominator: denom });
        }
        let mut num = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        num += self.r(i, j, k, l) * u[i] * v[j] * u[k] * v[l];
                    }
                }
            }
        }
        Ok(num / denom)
    }

    /// Largest violation of the algebraic Riemann symmetries and the first
    /// Bianchi identity.
    pub fn algebraic_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.r(i, j, k, l);
                        worst = worst
                            .max((v + self.r(j, i, k, l)).abs())
                            .max((v + self.r(i, j, l, k)).abs())
                            .max((v - self.r(k, l, i, j)).abs())
                            .max((v + self.r(j, k, i, l) + self.r(k, i, j, l)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// `∂_l Γ^k_ij = ∂_l g^{km} Γ_{m,ij} + g^{km} ∂_l Γ_{m,ij}` with
/// `∂_l g^{km} = −g^{ka} ∂_l g_ab g^{bm}`.
fn connection_derivative(jet: &crate::chart::MetricJet, ginv: &[f64], gamma: &[f64]) -> Vec<f64> {
    let n = jet.n;
    let mut out = vec![0.0; n * n * n * n];
    for l in 0..n {
        // ∂_l Γ_{m,ij}
        let mut dfirst = vec![0.0; n * n * n];
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    dfirst[(m * n + i) * n + j] =
                        0.5 * (jet.dd(l, i, j, m) + jet.dd(l, j, i, m) - jet.dd(l, m, i, j));
                }
            }
        }
        // ∂_l Γ^k_ij = g^{km}(∂_l Γ_{m,ij} − ∂_l g_{mb} Γ^b_ij)
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for m in 0..n {
                        let gkm = ginv[k * n + m];
                        if gkm == 0.0 {
                            continue;
                        }
                        let mut inner = dfirst[(m * n + i) * n + j];
                        for b in 0..n {
                            inner -= jet.d(l, m, b) * gamma[(b * n + i) * n + j];
                        }
                        v += gkm * inner;
                    }
                    out[((l * n + k) * n + i) * n + j] = v;
                }
            }
        }
    }
    out
}

/// Metric components `g_ij`; the point must lie in the margin-shrunk domain.
pub fn metric_at(chart: &Chart, point: &[f64]) -> Result<TensorValue> {
    if !chart.in_sampling_region(point) {
        return Err(GeometryError::PointOutOfDomain {
            point: point.to_vec(),
        });
    }
    let n = chart.dim();
    let g = chart.metric_components(point);
    spd_inverse(n, &g, point)?;
    TensorValue::covariant(n, 2, g).declare(&[Symmetry::Symmetric(0, 1)])
}

/// Inverse metric `g^ij`.
pub fn inverse_metric_at(chart: &Chart, point: &[f64]) -> Result<TensorValue> {
    let g = metric_at(chart, point)?;
    let n = chart.dim();
    let inv = spd_inverse(n, g.components(), point)?;
    TensorValue::new(n, vec![Variance::Contravariant; 2], inv).declare(&[Symmetry::Symmetric(0, 1)])
}

/// Christoffel symbols `Γ^k_ij`, stored with the upper index first.
pub fn christoffel(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let c = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    Ok(TensorValue::new(
        c.n,
        vec![Variance::Contravariant, Variance::Covariant, Variance::Covariant],
        c.gamma,
    ))
}

pub fn riemann(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let c = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    Ok(TensorValue::covariant(c.n, 4, c.riemann))
}

pub fn ricci(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let c = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    TensorValue::covariant(c.n, 2, c.ricci).declare(&[Symmetry::Symmetric(0, 1)])
}

pub fn scalar_curvature(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    Ok(PointCurvature::at(chart, point, cfg, Depth::Curvature)?.scalar)
}

pub fn traceless_ricci(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let c = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    TensorValue::covariant(c.n, 2, c.traceless_ricci()).declare(&[Symmetry::Symmetric(0, 1)])
}

pub fn sectional_curvature(
    chart: &Chart,
    point: &[f64],
    u: &[f64],
    v: &[f64],
    cfg: &DiffConfig,
) -> Result<f64> {
    PointCurvature::at(chart, point, cfg, Depth::Curvature)?.sectional(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_unverified, Params, SpaceId};

    fn sphere() -> (Chart, Vec<f64>) {
        let s = build_unverified(SpaceId::Hemisphere, 3, &Params::default()).unwrap();
        (s.chart, vec![0.8, 1.2, 0.5])
    }

    #[test]
    fn parallel_vectors_span_no_plane() {
        let (c, x) = sphere();
        let pc = PointCurvature::at(&c, &x, &DiffConfig::default(), Depth::Curvature).unwrap();
        let err = pc.sectional(&[1.0, 2.0, 0.0], &[2.0, 4.0, 0.0]).unwrap_err();
        assert!(matches!(err, GeometryError::DegeneratePlane { .. }));
    }

    #[test]
    fn sectional_curvature_ignores_basis_of_plane() {
        let (c, x) = sphere();
        let pc = PointCurvature::at(&c, &x, &DiffConfig::default(), Depth::Curvature).unwrap();
        let (u, v) = ([1.0, 0.3, 0.0], [0.0, 1.0, 2.0]);
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
        let k1 = pc.sectional(&u, &v).unwrap();
        let k2 = pc.sectional(&w, &v).unwrap();
        assert!((k1 - k2).abs() < 1e-12);
    }

    #[test]
    fn sphere_ricci_is_twice_metric() {
        let (c, x) = sphere();
        let pc = PointCurvature::at(&c, &x, &DiffConfig::default(), Depth::Curvature).unwrap();
        for (r, g) in pc.ricci.iter().zip(&pc.g) {
            assert!((r - 2.0 * g).abs() < 1e-9);
        }
        assert!(pc.traceless_ricci().iter().all(|v| v.abs() < 1e-9));
        assert!(pc.algebraic_defect() < 1e-12);
    }

    #[test]
    fn analytic_and_fd_backends_agree() {
        let (c, x) = sphere();
        let cfg = DiffConfig::default();
        let a = PointCurvature::at(&c, &x, &cfg, Depth::Curvature).unwrap();
        let fd = c.with_backend(crate::chart::Backend::FiniteDifference);
        let b = PointCurvature::at(&fd, &x, &cfg, Depth::Curvature).unwrap();
        for (p, q) in a.riemann.iter().zip(&b.riemann) {
            assert!((p - q).abs() < 1e-6);
        }
    }
}
