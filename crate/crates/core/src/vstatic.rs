//! The V-static equation `−(Δf)g + Hess f − f Ric = κ g` and its first-order
//! consequences.

use crate::chart::Chart;
use crate::conformal;
use crate::covariant::{self, hessian_from_jet};
use crate::curvature::{Depth, PointCurvature};
use crate::diff::{self, DiffConfig, ScalarField};
use crate::error::{GeometryError, Result};
use crate::tensor::{max_abs, Symmetry, TensorValue};

/// Points where the V-static residual exceeds this are outside the lemmas'
/// hypothesis.
pub const HYPOTHESIS_LIMIT: f64 = 1e-5;

/// A candidate V-static pair `(f, κ)`.
#[derive(Debug, Clone)]
pub struct Potential {
    pub f: ScalarField,
    pub kappa: f64,
}

impl Potential {
    pub fn new(f: ScalarField, kappa: f64) -> Self {
        Self { f, kappa }
    }
}

#[derive(Debug, Clone)]
pub struct VStaticTriple {
    pub chart: Chart,
    pub potential: Potential,
    pub declared_scalar_curvature: Option<f64>,
}

/// An absolute residual together with the largest individual term it was
/// assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub scale: f64,
}

impl Residual {
    pub fn new(abs: f64, scale: f64) -> Self {
        Self { abs, scale }
    }

    /// `abs / max(scale, floor)`.
    pub fn relative(&self, floor: f64) -> f64 {
        self.abs / self.scale.max(floor)
    }
}

/// Potential data at a point: value, coordinate gradient, covariant Hessian
/// and Laplacian.
#[derive(Debug, Clone)]
pub struct PotentialJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<f64>,
    pub laplacian: f64,
}

impl PotentialJet {
    pub fn at(f: &ScalarField, chart: &Chart, curv: &PointCurvature, cfg: &DiffConfig) -> Result<Self> {
        let jet = f.jet(&curv.point, chart.domain(), cfg)?;
        let hessian = hessian_from_jet(curv, &jet.gradient, &jet.hessian);
        let laplacian = curv.ginv.iter().zip(&hessian).map(|(a, b)| a * b).sum();
        Ok(Self {
            value: jet.value,
            gradient: jet.gradient,
            hessian,
            laplacian,
        })
    }

    /// `∇^i f`.
    pub fn gradient_up(&self, curv: &PointCurvature) -> Vec<f64> {
        let n = curv.n;
        (0..n)
            .map(|i| (0..n).map(|a| curv.ginv[i * n + a] * self.gradient[a]).sum())
            .collect()
    }
}

pub(crate) fn vstatic_parts(curv: &PointCurvature, fj: &PotentialJet, kappa: f64) -> Residual {
    let mut abs = 0.0f64;
    let mut scale = 0.0f64;
    for ij in 0..curv.n * curv.n {
        let terms = [
            -fj.laplacian * curv.g[ij],
            fj.hessian[ij],
            -fj.value * curv.ricci[ij],
            -kappa * curv.g[ij],
        ];
        abs = abs.max(terms.iter().sum::<f64>().abs());
        scale = terms.iter().fold(scale, |m, t| m.max(t.abs()));
    }
    Residual::new(abs, scale)
}

pub(crate) fn trace_parts(curv: &PointCurvature, fj: &PotentialJet, kappa: f64) -> Residual {
    let n = curv.n as f64;
    let terms = [
        fj.laplacian,
        curv.scalar * fj.value / (n - 1.0),
        n * kappa / (n - 1.0),
    ];
    Residual::new(terms.iter().sum::<f64>().abs(), max_abs(&terms))
}

pub(crate) fn traceless_parts(curv: &PointCurvature, fj: &PotentialJet) -> Residual {
    let n = curv.n;
    let rc = curv.traceless_ricci();
    let mut abs = 0.0f64;
    let mut scale = 0.0f64;
    for ij in 0..n * n {
        let lhs = fj.value * rc[ij];
        let rhs = fj.hessian[ij] - fj.laplacian / n as f64 * curv.g[ij];
        abs = abs.max((lhs - rhs).abs());
        scale = scale.max(lhs.abs()).max(rhs.abs());
    }
    Residual::new(abs, scale)
}

/// Errors unless the V-static equation holds at the point to
/// [`HYPOTHESIS_LIMIT`].
pub(crate) fn require_vstatic(
    identity: &'static str,
    curv: &PointCurvature,
    fj: &PotentialJet,
    kappa: f64,
) -> Result<()> {
    let r = vstatic_parts(curv, fj, kappa);
    if r.abs > HYPOTHESIS_LIMIT || !r.abs.is_finite() {
        return Err(GeometryError::HypothesisViolated {
            identity,
            detail: format!("V-static residual {:.3e} exceeds {:.0e}", r.abs, HYPOTHESIS_LIMIT),
        });
    }
    Ok(())
}

/// `R_ijkl ∇^l f + R/(n−1)(∇_i f g_jk − ∇_j f g_ik) − (∇_i f R_jk − ∇_j f R_ik)`
/// against `f(∇_i R_jk − ∇_j R_ik)`.
pub(crate) fn lemma1_parts(curv: &PointCurvature, fj: &PotentialJet, nabla_ric: &[f64]) -> Residual {
    let n = curv.n;
    let nn = n * n;
    let up = fj.gradient_up(curv);
    let df = &fj.gradient;
    let c = curv.scalar / (n as f64 - 1.0);
    let mut abs = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let lhs = fj.value * (nabla_ric[i * nn + j * n + k] - nabla_ric[j * nn + i * n + k]);
                let rm: f64 = (0..n).map(|l| curv.r(i, j, k, l) * up[l]).sum();
                let sc = c * (df[i] * curv.g[j * n + k] - df[j] * curv.g[i * n + k]);
                let rc = -(df[i] * curv.ricci[j * n + k] - df[j] * curv.ricci[i * n + k]);
                abs = abs.max((lhs - rm - sc - rc).abs());
                scale = scale.max(lhs.abs()).max(rm.abs()).max(sc.abs()).max(rc.abs());
            }
        }
    }
    Residual::new(abs, scale)
}

/// The auxiliary tensor `T_ijk`.
pub fn tensor_t_from(curv: &PointCurvature, grad_f: &[f64]) -> Vec<f64> {
    let n = curv.n;
    let nf = n as f64;
    let g = &curv.g;
    let ric = &curv.ricci;
    let up: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|a| curv.ginv[i * n + a] * grad_f[a]).sum())
        .collect();
    // R_is ∇^s f
    let rdf: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|s| ric[i * n + s] * up[s]).sum())
        .collect();
    let df = grad_f;
    let mut t = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                t[(i * n + j) * n + k] = (nf - 1.0) / (nf - 2.0)
                    * (ric[i * n + k] * df[j] - ric[j * n + k] * df[i])
                    + (g[i * n + k] * rdf[j] - g[j * n + k] * rdf[i]) / (nf - 2.0)
                    - curv.scalar / (nf - 2.0) * (g[i * n + k] * df[j] - g[j * n + k] * df[i]);
            }
        }
    }
    t
}

/// `f C − T − W(·,·,·,∇f)`.
pub(crate) fn decomposition_parts(curv: &PointCurvature, fj: &PotentialJet, cotton: &[f64]) -> Residual {
    let t = tensor_t_from(curv, &fj.gradient);
    let w = conformal::weyl_from(curv);
    let rw = conformal::radial_weyl_from(curv, &w, &fj.gradient);
    let mut abs = 0.0f64;
    let mut scale = 0.0f64;
    for a in 0..t.len() {
        let fc = fj.value * cotton[a];
        abs = abs.max((fc - t[a] - rw[a]).abs());
        scale = scale.max(fc.abs()).max(t[a].abs()).max(rw[a].abs());
    }
    Residual::new(abs, scale)
}

fn point_data(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<(PointCurvature, PotentialJet)> {
    let curv = PointCurvature::at(&triple.chart, point, cfg, Depth::Curvature)?;
    let fj = PotentialJet::at(&triple.potential.f, &triple.chart, &curv, cfg)?;
    Ok((curv, fj))
}

pub(crate) fn nabla_ricci(chart: &Chart, curv: &PointCurvature, cfg: &DiffConfig) -> Result<Vec<f64>> {
    let d1 = diff::jet1(covariant::ricci_field(chart, cfg), &curv.point, chart.domain(), cfg)?;
    Ok(covariant::nabla_from_partials(curv, 2, &curv.ricci, &d1))
}

/// Max component of `−(Δf)g + Hess f − f Ric − κ g`.
pub fn vstatic_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let (curv, fj) = point_data(triple, point, cfg)?;
    Ok(vstatic_parts(&curv, &fj, triple.potential.kappa).abs)
}

/// `|Δf + R f/(n−1) + nκ/(n−1)|`.
pub fn trace_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let (curv, fj) = point_data(triple, point, cfg)?;
    Ok(trace_parts(&curv, &fj, triple.potential.kappa).abs)
}

/// Max component of `f Ric̊ − (Hess f − (Δf/n) g)`.
pub fn traceless_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let (curv, fj) = point_data(triple, point, cfg)?;
    Ok(traceless_parts(&curv, &fj).abs)
}

pub fn lemma1_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let (curv, fj) = point_data(triple, point, cfg)?;
    require_vstatic("lemma1", &curv, &fj, triple.potential.kappa)?;
    let nab = nabla_ricci(&triple.chart, &curv, cfg)?;
    Ok(lemma1_parts(&curv, &fj, &nab).abs)
}

pub fn tensor_t(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<TensorValue> {
    let (curv, fj) = point_data(triple, point, cfg)?;
    TensorValue::covariant(curv.n, 3, tensor_t_from(&curv, &fj.gradient)).declare(&[Symmetry::Antisymmetric(0, 1)])
}

pub fn decomposition_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let (curv, fj) = point_data(triple, point, cfg)?;
    require_vstatic("decomposition", &curv, &fj, triple.potential.kappa)?;
    let nab = nabla_ricci(&triple.chart, &curv, cfg)?;
    let c = conformal::cotton_from(&curv, &nab);
    Ok(decomposition_parts(&curv, &fj, &c).abs)
}
