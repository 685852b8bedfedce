//! Covariant derivatives of covariant tensor fields.
//!
//! A field is any closure returning the `n^rank` components of a fully
//! covariant tensor at a point. Partials come from the finite-difference jets
//! in [`crate::diff`]; the connection terms are added algebraically from the
//! Christoffel symbols (and their partials) at the base point. Derivative
//! indices come first: `(∇T)[a, I] = ∇_a T_I` and
//! `(∇∇T)[a, b, I] = ∇_a ∇_b T_I`.

use crate::chart::Chart;
use crate::curvature::{Depth, PointCurvature};
use crate::diff::{self, DiffConfig, ScalarField};
use crate::error::Result;
use crate::tensor::{TensorValue, Variance};

/// Replace the index in `slot` of flat offset `flat` by `m`.
#[inline]
fn with_slot(flat: usize, stride: usize, n: usize, m: usize) -> (usize, usize) {
    let i = (flat / stride) % n;
    (i, flat - i * stride + m * stride)
}

fn strides(n: usize, rank: usize) -> Vec<usize> {
    (0..rank).map(|s| n.pow((rank - 1 - s) as u32)).collect()
}

/// `∇_b T_I` from the field value and its coordinate partials.
pub fn nabla_from_partials(curv: &PointCurvature, rank: usize, value: &[f64], d1: &[Vec<f64>]) -> Vec<f64> {
    let n = curv.n;
    let size = value.len();
    let st = strides(n, rank);
    let mut out = vec![0.0; n * size];
    for b in 0..n {
        for flat in 0..size {
            let mut v = d1[b][flat];
            for &stride in &st {
                for m in 0..n {
                    let (i, moved) = with_slot(flat, stride, n, m);
                    v -= curv.gamma(m, b, i) * value[moved];
                }
            }
            out[b * size + flat] = v;
        }
    }
    out
}

/// `∇_a ∇_b T_I` from the field value and its first and second partials.
/// `curv` must carry `∂Γ`.
pub fn nabla2_from_partials(
    curv: &PointCurvature,
    rank: usize,
    value: &[f64],
    d1: &[Vec<f64>],
    d2: &[Vec<f64>],
    nabla: &[f64],
) -> Vec<f64> {
    let n = curv.n;
    let size = value.len();
    let st = strides(n, rank);
    let dgamma = curv
        .dgamma
        .as_ref()
        .expect("second covariant derivatives need ∂Γ");
    let dg = |l: usize, k: usize, i: usize, j: usize| dgamma[((l * n + k) * n + i) * n + j];
    let mut out = vec![0.0; n * n * size];
    for a in 0..n {
        for b in 0..n {
            for flat in 0..size {
                // ∂_a(∇_b T_I)
                let mut v = d2[a * n + b][flat];
                for &stride in &st {
                    for m in 0..n {
                        let (i, moved) = with_slot(flat, stride, n, m);
                        v -= dg(a, m, b, i) * value[moved] + curv.gamma(m, b, i) * d1[a][moved];
                    }
                }
                // − Γ^m_ab ∇_m T_I − Σ_s Γ^m_{a i_s} ∇_b T_{I(s→m)}
                for m in 0..n {
                    v -= curv.gamma(m, a, b) * nabla[m * size + flat];
                }
                for &stride in &st {
                    for m in 0..n {
                        let (i, moved) = with_slot(flat, stride, n, m);
                        v -= curv.gamma(m, a, i) * nabla[b * size + moved];
                    }
                }
                out[(a * n + b) * size + flat] = v;
            }
        }
    }
    out
}

/// First covariant derivative of a rank-`rank` covariant field.
pub fn covariant_derivative<F>(
    field: F,
    rank: usize,
    chart: &Chart,
    point: &[f64],
    cfg: &DiffConfig,
) -> Result<TensorValue>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let mut field = field;
    let value = field(point)?;
    let d1 = diff::jet1(&mut field, point, chart.domain(), cfg)?;
    let nab = nabla_from_partials(&curv, rank, &value, &d1);
    Ok(TensorValue::covariant(curv.n, rank + 1, nab))
}

/// Value, first and second covariant derivatives of a covariant field.
#[derive(Debug, Clone)]
pub struct CovariantJet {
    pub rank: usize,
    pub value: Vec<f64>,
    pub nabla: Vec<f64>,
    pub nabla2: Vec<f64>,
}

pub fn covariant_jet2<F>(
    field: F,
    rank: usize,
    chart: &Chart,
    curv: &PointCurvature,
    cfg: &DiffConfig,
) -> Result<CovariantJet>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let jet = diff::jet2(field, &curv.point, chart.domain(), cfg)?;
    let nabla = nabla_from_partials(curv, rank, &jet.value, &jet.d1);
    let nabla2 = nabla2_from_partials(curv, rank, &jet.value, &jet.d1, &jet.d2, &nabla);
    Ok(CovariantJet {
        rank,
        value: jet.value,
        nabla,
        nabla2,
    })
}

/// The Ricci field, for use as a differentiable closure.
pub fn ricci_field<'a>(chart: &'a Chart, cfg: &'a DiffConfig) -> impl Fn(&[f64]) -> Result<Vec<f64>> + 'a {
    move |y| Ok(PointCurvature::at(chart, y, cfg, Depth::Curvature)?.ricci)
}

/// `Hess f_ij = ∂_i∂_j f − Γ^k_ij ∂_k f` from a scalar jet.
pub fn hessian_from_jet(curv: &PointCurvature, gradient: &[f64], partials2: &[f64]) -> Vec<f64> {
    let n = curv.n;
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = partials2[i * n + j];
            for k in 0..n {
                v -= curv.gamma(k, i, j) * gradient[k];
            }
            h[i * n + j] = v;
        }
    }
    h
}

pub fn hessian(field: &ScalarField, chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let jet = field.jet(point, chart.domain(), cfg)?;
    Ok(TensorValue::covariant(
        curv.n,
        2,
        hessian_from_jet(&curv, &jet.gradient, &jet.hessian),
    ))
}

pub fn laplacian(field: &ScalarField, chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let jet = field.jet(point, chart.domain(), cfg)?;
    let h = hessian_from_jet(&curv, &jet.gradient, &jet.hessian);
    Ok(curv.ginv.iter().zip(&h).map(|(a, b)| a * b).sum())
}

/// Gradient of a scalar field as a covector.
pub fn gradient(field: &ScalarField, chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    chart.require_domain(point)?;
    let (_, grad) = field.gradient(point, chart.domain(), cfg)?;
    Ok(TensorValue::new(chart.dim(), vec![Variance::Covariant], grad))
}

/// Second covariant derivative data of Ricci at a point, shared by the
/// commutator and Bianchi checks.
#[derive(Debug, Clone)]
pub struct RicciJet {
    pub curv: PointCurvature,
    /// `∇_a R_bc`
    pub nabla: Vec<f64>,
    /// `∇_a ∇_b R_cd`
    pub nabla2: Vec<f64>,
}

impl RicciJet {
    pub fn at(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<Self> {
        let curv = PointCurvature::at(chart, point, cfg, Depth::WithConnectionDerivative)?;
        let jet = covariant_jet2(ricci_field(chart, cfg), 2, chart, &curv, cfg)?;
        Ok(Self {
            curv,
            nabla: jet.nabla,
            nabla2: jet.nabla2,
        })
    }
}

/// max over (i,j,k,l) of
/// `|∇_i∇_j R_kl − ∇_j∇_i R_kl − R_ijks R^s_l − R_ijls R^s_k|`.
pub fn ricci_identity_residual(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let rj = RicciJet::at(chart, point, cfg)?;
    Ok(ricci_identity_from(&rj))
}

pub fn ricci_identity_from(rj: &RicciJet) -> f64 {
    let c = &rj.curv;
    let n = c.n;
    let a = c.ricci_endomorphism(); // a[s*n + l] = R^s_l
    let nn = n * n;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let comm = rj.nabla2[(i * n + j) * nn + k * n + l] - rj.nabla2[(j * n + i) * nn + k * n + l];
                    let mut rhs = 0.0;
                    for s in 0..n {
                        rhs += c.r(i, j, k, s) * a[s * n + l] + c.r(i, j, l, s) * a[s * n + k];
                    }
                    worst = worst.max((comm - rhs).abs());
                }
            }
        }
    }
    worst
}

/// Contracted second Bianchi identity, `g^{jk}∇_k R_ij − ½∇_i R`, max over i.
pub fn contracted_bianchi_residual(curv: &PointCurvature, nabla_ric: &[f64]) -> f64 {
    let n = curv.n;
    let nn = n * n;
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut div = 0.0;
        let mut grad_r = 0.0;
        for j in 0..n {
            for k in 0..n {
                div += curv.ginv[j * n + k] * nabla_ric[k * nn + i * n + j];
                grad_r += curv.ginv[j * n + k] * nabla_ric[i * nn + j * n + k];
            }
        }
        worst = worst.max((div - 0.5 * grad_r).abs());
    }
    worst
}

/// Residual of `(div Rm)_jkl = ∇_k R_jl − ∇_l R_jk`, where the divergence
/// contracts the derivative with the first Riemann slot. The Riemann field is
/// differenced directly.
pub fn riemann_divergence_residual(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let n = curv.n;
    let riem = |y: &[f64]| Ok(PointCurvature::at(chart, y, cfg, Depth::Curvature)?.riemann);
    let mut riem = riem;
    let d1 = diff::jet1(&mut riem, point, chart.domain(), cfg)?;
    let nab_rm = nabla_from_partials(&curv, 4, &curv.riemann, &d1);
    let d1r = diff::jet1(ricci_field(chart, cfg), point, chart.domain(), cfg)?;
    let nab_ric = nabla_from_partials(&curv, 2, &curv.ricci, &d1r);
    let n4 = n * n * n * n;
    let nn = n * n;
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut div = 0.0;
                for a in 0..n {
                    for i in 0..n {
                        div += curv.ginv[a * n + i] * nab_rm[a * n4 + ((i * n + j) * n + k) * n + l];
                    }
                }
                let rhs = nab_ric[k * nn + j * n + l] - nab_ric[l * nn + j * n + k];
                worst = worst.max((div - rhs).abs());
            }
        }
    }
    Ok(worst)
}
