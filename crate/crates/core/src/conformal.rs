//! Weyl, Cotton and Bach tensors.
//!
//! Weyl is always obtained by subtracting the Ricci part from Riemann:
//!
//! `W_ijkl = R_ijkl − (R_ik g_jl + R_jl g_ik − R_il g_jk − R_jk g_il)/(n−2)
//!           + R (g_ik g_jl − g_il g_jk)/((n−1)(n−2))`
//!
//! Cotton is `C_ijk = ∇_i R_jk − ∇_j R_ik − (∇_i R g_jk − ∇_j R g_ik)/(2(n−1))`.
//! Bach is `B_ij = ∇^k∇^l W_ikjl/(n−3) + R^{kl} W_ikjl/(n−2)` for `n ≥ 4`, where
//! `k` and `l` are raised on Weyl slots 2 and 4, and `B_ij = ∇^k C_kij` for
//! `n = 3`.

use crate::chart::Chart;
use crate::covariant::{self, RicciJet};
use crate::curvature::{Depth, PointCurvature};
use crate::diff::{self, DiffConfig, ScalarField};
use crate::error::{GeometryError, Result};
use crate::tensor::{self, Symmetry, TensorValue};

/// The Ricci/scalar part of the Weyl decomposition.
pub fn ricci_part(curv: &PointCurvature) -> Vec<f64> {
    let n = curv.n;
    let nf = n as f64;
    let g = &curv.g;
    let ric = &curv.ricci;
    let c1 = 1.0 / (nf - 2.0);
    let c2 = curv.scalar / ((nf - 1.0) * (nf - 2.0));
    let mut out = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let (ik, jl, il, jk) = (i * n + k, j * n + l, i * n + l, j * n + k);
                    out[((i * n + j) * n + k) * n + l] = c1
                        * (ric[ik] * g[jl] + ric[jl] * g[ik] - ric[il] * g[jk] - ric[jk] * g[il])
                        - c2 * (g[ik] * g[jl] - g[il] * g[jk]);
                }
            }
        }
    }
    out
}

/// Weyl components by subtraction.
pub fn weyl_from(curv: &PointCurvature) -> Vec<f64> {
    let part = ricci_part(curv);
    curv.riemann.iter().zip(&part).map(|(r, p)| r - p).collect()
}

/// `max |R − W − (Ricci part)|`.
pub fn decomposition_closure(curv: &PointCurvature, w: &[f64]) -> f64 {
    let part = ricci_part(curv);
    curv.riemann
        .iter()
        .zip(w)
        .zip(&part)
        .fold(0.0f64, |m, ((r, w), p)| m.max((r - w - p).abs()))
}

/// Largest single-contraction trace of a covariant 4-tensor.
pub fn weyl_trace_defect(curv: &PointCurvature, w: &[f64]) -> f64 {
    let n = curv.n;
    let at = |i: usize, j: usize, k: usize, l: usize| w[((i * n + j) * n + k) * n + l];
    let mut worst = 0.0f64;
    for p in 0..n {
        for q in 0..n {
            let mut t = [0.0; 4];
            for a in 0..n {
                for b in 0..n {
                    let gab = curv.ginv[a * n + b];
                    t[0] += gab * at(a, p, b, q);
                    t[1] += gab * at(a, p, q, b);
                    t[2] += gab * at(p, a, b, q);
                    t[3] += gab * at(p, a, q, b);
                }
            }
            for v in t {
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

/// `∇_i R = g^{ab} ∇_i R_ab` from `∇Ric`.
pub fn scalar_gradient(curv: &PointCurvature, nabla_ric: &[f64]) -> Vec<f64> {
    let n = curv.n;
    let nn = n * n;
    (0..n)
        .map(|i| (0..nn).map(|ab| curv.ginv[ab] * nabla_ric[i * nn + ab]).sum())
        .collect()
}

/// Cotton components from `∇Ric`.
pub fn cotton_from(curv: &PointCurvature, nabla_ric: &[f64]) -> Vec<f64> {
    let n = curv.n;
    let nn = n * n;
    let dr = scalar_gradient(curv, nabla_ric);
    let c = 1.0 / (2.0 * (n as f64 - 1.0));
    let mut out = vec![0.0; n * nn];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[(i * n + j) * n + k] = nabla_ric[i * nn + j * n + k] - nabla_ric[j * nn + i * n + k]
                    - c * (dr[i] * curv.g[j * n + k] - dr[j] * curv.g[i * n + k]);
            }
        }
    }
    out
}

/// Largest violation of Cotton antisymmetry in the first pair and of its
/// traces over every index pair.
pub fn cotton_defect(curv: &PointCurvature, c: &[f64]) -> f64 {
    let n = curv.n;
    let at = |i: usize, j: usize, k: usize| c[(i * n + j) * n + k];
    let mut worst = 0.0f64;
    for p in 0..n {
        let mut t = [0.0; 3];
        for q in 0..n {
            for r in 0..n {
                worst = worst.max((at(p, q, r) + at(q, p, r)).abs());
            }
        }
        for a in 0..n {
            for b in 0..n {
                let gab = curv.ginv[a * n + b];
                t[0] += gab * at(a, b, p);
                t[1] += gab * at(a, p, b);
                t[2] += gab * at(p, a, b);
            }
        }
        for v in t {
            worst = worst.max(v.abs());
        }
    }
    worst
}

/// The Weyl field, for differentiation.
pub fn weyl_field<'a>(chart: &'a Chart, cfg: &'a DiffConfig) -> impl Fn(&[f64]) -> Result<Vec<f64>> + 'a {
    move |y| Ok(weyl_from(&PointCurvature::at(chart, y, cfg, Depth::Curvature)?))
}

/// Bach for `n ≥ 4` from `∇∇W`.
fn bach_high(curv: &PointCurvature, w: &[f64], nabla2_w: &[f64]) -> Vec<f64> {
    let n = curv.n;
    let nf = n as f64;
    let n4 = n * n * n * n;
    let ric_up = curv.ricci_up();
    let wat = |i: usize, j: usize, k: usize, l: usize| w[((i * n + j) * n + k) * n + l];
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut div2 = 0.0;
            let mut alg = 0.0;
            for k in 0..n {
                for l in 0..n {
                    for a in 0..n {
                        let gka = curv.ginv[k * n + a];
                        if gka == 0.0 {
                            continue;
                        }
                        for b in 0..n {
                            let glb = curv.ginv[l * n + b];
                            if glb == 0.0 {
                                continue;
                            }
                            div2 += gka * glb * nabla2_w[(a * n + b) * n4 + ((i * n + k) * n + j) * n + l];
                        }
                    }
                    alg += ric_up[k * n + l] * wat(i, k, j, l);
                }
            }
            out[i * n + j] = div2 / (nf - 3.0) + alg / (nf - 2.0);
        }
    }
    out
}

/// Bach for `n = 3` as the divergence of Cotton, from `∇∇Ric`.
fn bach_three(rj: &RicciJet) -> Vec<f64> {
    let c = &rj.curv;
    let n = c.n;
    let nn = n * n;
    let k0 = 1.0 / (2.0 * (n as f64 - 1.0));
    // ∇_a∇_b R
    let mut hr = vec![0.0; nn];
    for ab in 0..nn {
        hr[ab] = (0..nn).map(|cd| c.ginv[cd] * rj.nabla2[ab * nn + cd]).sum();
    }
    let n2 = |a: usize, b: usize, i: usize, j: usize| rj.nabla2[(a * n + b) * nn + i * n + j];
    let mut out = vec![0.0; nn];
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for k in 0..n {
                for a in 0..n {
                    let gka = c.ginv[k * n + a];
                    // ∇_a C_kij
                    let dc = n2(a, k, i, j) - n2(a, i, k, j)
                        - k0 * (hr[a * n + k] * c.g[i * n + j] - hr[a * n + i] * c.g[k * n + j]);
                    v += gka * dc;
                }
            }
            out[i * n + j] = v;
        }
    }
    out
}

/// Weyl, Cotton and Bach at one point.
#[derive(Debug, Clone)]
pub struct ConformalBundle {
    pub weyl: TensorValue,
    pub cotton: TensorValue,
    pub bach: TensorValue,
    pub evaluated_at: Vec<f64>,
}

impl ConformalBundle {
    pub fn at(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<Self> {
        let rj = RicciJet::at(chart, point, cfg)?;
        let n = rj.curv.n;
        let w = weyl_from(&rj.curv);
        let c = cotton_from(&rj.curv, &rj.nabla);
        let b = if n == 3 {
            bach_three(&rj)
        } else {
            let jet = covariant::covariant_jet2(weyl_field(chart, cfg), 4, chart, &rj.curv, cfg)?;
            bach_high(&rj.curv, &w, &jet.nabla2)
        };
        Ok(Self {
            weyl: weyl_tensor(n, w)?,
            cotton: TensorValue::covariant(n, 3, c).declare(&[Symmetry::Antisymmetric(0, 1)])?,
            bach: TensorValue::covariant(n, 2, b),
            evaluated_at: point.to_vec(),
        })
    }
}

fn weyl_tensor(n: usize, w: Vec<f64>) -> Result<TensorValue> {
    TensorValue::covariant(n, 4, w).declare(&[
        Symmetry::Antisymmetric(0, 1),
        Symmetry::Antisymmetric(2, 3),
        Symmetry::PairExchange,
    ])
}

pub fn weyl(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    weyl_tensor(curv.n, weyl_from(&curv))
}

pub fn cotton(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let d1 = diff::jet1(covariant::ricci_field(chart, cfg), point, chart.domain(), cfg)?;
    let nab = covariant::nabla_from_partials(&curv, 2, &curv.ricci, &d1);
    TensorValue::covariant(curv.n, 3, cotton_from(&curv, &nab)).declare(&[Symmetry::Antisymmetric(0, 1)])
}

pub fn bach(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    Ok(ConformalBundle::at(chart, point, cfg)?.bach)
}

/// `max |C_ijk + (n−2)/(n−3) g^{la} ∇_a W_ijkl|`.
pub fn cotton_weyl_relation_residual(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let n = chart.dim();
    if n < 4 {
        return Err(GeometryError::DimensionUnsupported { n, min: 4 });
    }
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let d1w = diff::jet1(weyl_field(chart, cfg), point, chart.domain(), cfg)?;
    let w = weyl_from(&curv);
    let nab_w = covariant::nabla_from_partials(&curv, 4, &w, &d1w);
    let d1r = diff::jet1(covariant::ricci_field(chart, cfg), point, chart.domain(), cfg)?;
    let nab_r = covariant::nabla_from_partials(&curv, 2, &curv.ricci, &d1r);
    let c = cotton_from(&curv, &nab_r);
    Ok(cotton_weyl_from(&curv, &c, &nab_w))
}

pub(crate) fn cotton_weyl_from(curv: &PointCurvature, c: &[f64], nab_w: &[f64]) -> f64 {
    let n = curv.n;
    let nf = n as f64;
    let n4 = n * n * n * n;
    let ratio = (nf - 2.0) / (nf - 3.0);
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut div = 0.0;
                for l in 0..n {
                    for a in 0..n {
                        div += curv.ginv[l * n + a] * nab_w[a * n4 + ((i * n + j) * n + k) * n + l];
                    }
                }
                worst = worst.max((c[(i * n + j) * n + k] + ratio * div).abs());
            }
        }
    }
    worst
}

/// `W_ijkl ∇^l f`.
pub fn radial_weyl_from(curv: &PointCurvature, w: &[f64], grad_f: &[f64]) -> Vec<f64> {
    let n = curv.n;
    let up: Vec<f64> = (0..n)
        .map(|l| (0..n).map(|a| curv.ginv[l * n + a] * grad_f[a]).sum())
        .collect();
    let mut out = vec![0.0; n * n * n];
    for ijk in 0..n * n * n {
        out[ijk] = (0..n).map(|l| w[ijk * n + l] * up[l]).sum();
    }
    out
}

pub fn radial_weyl(chart: &Chart, f: &ScalarField, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let (_, grad) = f.gradient(point, chart.domain(), cfg)?;
    let w = weyl_from(&curv);
    Ok(TensorValue::covariant(curv.n, 3, radial_weyl_from(&curv, &w, &grad)))
}

/// `|W(·,·,·,∇f)|` measured with the metric.
pub fn radial_weyl_norm(curv: &PointCurvature, w: &[f64], grad_f: &[f64]) -> f64 {
    let rw = radial_weyl_from(curv, w, grad_f);
    tensor::norm_sq(&curv.ginv, curv.n, 3, &rw).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_unverified, Params, SpaceId};

    fn curvature(id: SpaceId, n: usize, x: &[f64]) -> PointCurvature {
        let s = build_unverified(id, n, &Params::default()).unwrap();
        PointCurvature::at(&s.chart, x, &DiffConfig::default(), Depth::Curvature).unwrap()
    }

    #[test]
    fn space_form_is_all_ricci_part() {
        let c = curvature(SpaceId::Hemisphere, 4, &[0.9, 1.0, 1.2, 2.0]);
        let w = weyl_from(&c);
        assert!(w.iter().all(|v| v.abs() < 1e-9));
        assert!(decomposition_closure(&c, &w) <= 1e-12);
    }

    #[test]
    fn product_weyl_is_trace_free() {
        let c = curvature(SpaceId::ProductSpheres, 4, &[1.0, 2.0, 0.7, 3.0]);
        let w = weyl_from(&c);
        assert!(w.iter().any(|v| v.abs() > 0.1));
        assert!(weyl_trace_defect(&c, &w) <= 1e-10);
    }

    #[test]
    fn radial_weyl_needs_a_gradient() {
        let c = curvature(SpaceId::ProductSpheres, 4, &[1.0, 2.0, 0.7, 3.0]);
        let w = weyl_from(&c);
        assert_eq!(radial_weyl_norm(&c, &w, &[0.0; 4]), 0.0);
        assert!(radial_weyl_norm(&c, &w, &[1.0, 0.0, 0.0, 0.0]) > 0.0);
    }
}
