//! Divergence formulas for `f∇|Ric|²`, the Böchner identity for V-static
//! metrics, its zero-radial-Weyl form, and the pointwise inequalities.
//!
//! Indices are contracted with the metric throughout; every formula is
//! written in the orthonormal-frame convention and evaluated in coordinates.

use crate::chart::Chart;
use crate::conformal;
use crate::covariant::{self, hessian_from_jet};
use crate::curvature::{Depth, PointCurvature};
use crate::diff::{self, DiffConfig, ScalarField};
use crate::error::{GeometryError, Result};
use crate::spectral::SpectralData;
use crate::tensor::{matmul, norm_sq, raise_all, trace};
use crate::vstatic::{self, PotentialJet, Residual, VStaticTriple};

/// Radial Weyl norms above this violate the zero-radial-Weyl hypothesis.
pub const RADIAL_WEYL_LIMIT: f64 = 1e-6;
/// Spread of scalar curvature over a grid tolerated as "constant".
pub const CONSTANT_R_LIMIT: f64 = 1e-5;

/// Every term of the Böchner identity at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BochnerBreakdown {
    /// `½ div(f∇|Ric|²)`
    pub lhs: f64,
    /// `(n−2)/(n−1) f|C|²`
    pub term_cotton: f64,
    /// `f|∇Ric|²`
    pub term_gradric: f64,
    /// `nκ/(n−1) |Ric̊|²`
    pub term_kappa: f64,
    /// `f(2R|Ric̊|²/(n−1) + 2n tr(Ric̊³)/(n−2))`
    pub term_cubic: f64,
    /// `−(n−2)/(n−1) W_ijkl ∇_l f C_ijk`
    pub term_weyl_cotton: f64,
    /// `−2f W_ijkl R_ik R_jl`
    pub term_weyl_ricci: f64,
    /// `lhs − Σ terms`
    pub residual: f64,
}

impl BochnerBreakdown {
    pub fn terms(&self) -> [f64; 6] {
        [
            self.term_cotton,
            self.term_gradric,
            self.term_kappa,
            self.term_cubic,
            self.term_weyl_cotton,
            self.term_weyl_ricci,
        ]
    }

    /// Largest magnitude among the left side and the individual terms.
    pub fn scale(&self) -> f64 {
        self.terms().iter().fold(self.lhs.abs(), |m, t| m.max(t.abs()))
    }
}

/// Curvature, potential and derivative data shared by the divergence
/// identities at one point.
#[derive(Debug, Clone)]
pub struct BochnerPoint {
    pub curv: PointCurvature,
    pub fj: PotentialJet,
    /// `∇_a R_bc`
    pub nabla_ric: Vec<f64>,
    /// Coordinate gradient of `|Ric|²`.
    pub ricnorm_gradient: Vec<f64>,
    /// `Δ|Ric|²`
    pub ricnorm_laplacian: f64,
    pub weyl: Vec<f64>,
    pub cotton: Vec<f64>,
}

impl BochnerPoint {
    pub fn at(chart: &Chart, f: &ScalarField, point: &[f64], cfg: &DiffConfig) -> Result<Self> {
        let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
        let n = curv.n;
        let nn = n * n;
        // Ricci components followed by |Ric|², differenced together.
        let field = |y: &[f64]| -> Result<Vec<f64>> {
            let c = PointCurvature::at(chart, y, cfg, Depth::Curvature)?;
            let mut v = c.ricci.clone();
            v.push(c.ricci_norm_sq());
            Ok(v)
        };
        let jet = diff::jet2(field, point, chart.domain(), cfg)?;
        let d1_ric: Vec<Vec<f64>> = jet.d1.iter().map(|v| v[..nn].to_vec()).collect();
        let nabla_ric = covariant::nabla_from_partials(&curv, 2, &curv.ricci, &d1_ric);
        let ricnorm_gradient: Vec<f64> = jet.d1.iter().map(|v| v[nn]).collect();
        let ricnorm_d2: Vec<f64> = jet.d2.iter().map(|v| v[nn]).collect();
        let hess = hessian_from_jet(&curv, &ricnorm_gradient, &ricnorm_d2);
        let ricnorm_laplacian = curv.ginv.iter().zip(&hess).map(|(a, b)| a * b).sum();
        let fj = PotentialJet::at(f, chart, &curv, cfg)?;
        let weyl = conformal::weyl_from(&curv);
        let cotton = conformal::cotton_from(&curv, &nabla_ric);
        Ok(Self {
            curv,
            fj,
            nabla_ric,
            ricnorm_gradient,
            ricnorm_laplacian,
            weyl,
            cotton,
        })
    }

    fn n(&self) -> f64 {
        self.curv.n as f64
    }

    fn dot_up(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.curv.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.curv.ginv[i * n + j] * a[i] * b[j];
            }
        }
        s
    }

    /// `⟨∇f, ∇|Ric|²⟩`
    pub fn grad_f_dot_grad_ricnorm(&self) -> f64 {
        self.dot_up(&self.fj.gradient, &self.ricnorm_gradient)
    }

    /// `½ div(f∇|Ric|²) = ½(⟨∇f, ∇|Ric|²⟩ + f Δ|Ric|²)`
    pub fn half_div(&self) -> f64 {
        0.5 * (self.grad_f_dot_grad_ricnorm() + self.fj.value * self.ricnorm_laplacian)
    }

    pub fn cotton_norm_sq(&self) -> f64 {
        norm_sq(&self.curv.ginv, self.curv.n, 3, &self.cotton)
    }

    pub fn nabla_ric_norm_sq(&self) -> f64 {
        norm_sq(&self.curv.ginv, self.curv.n, 3, &self.nabla_ric)
    }

    pub fn traceless_norm_sq(&self) -> f64 {
        traceless_invariants(&self.curv).0
    }

    pub fn traceless_cubed(&self) -> f64 {
        traceless_invariants(&self.curv).1
    }

    /// `W_ijkl R_ik R_jl`
    pub fn weyl_ricci(&self) -> f64 {
        weyl_ricci_contraction(&self.curv, &self.weyl)
    }

    /// `W_ijkl ∇_l f C_ijk`
    pub fn weyl_cotton(&self) -> f64 {
        let n = self.curv.n;
        let rw = conformal::radial_weyl_from(&self.curv, &self.weyl, &self.fj.gradient);
        let c_up = raise_all(&self.curv.ginv, n, 3, &self.cotton);
        rw.iter().zip(&c_up).map(|(a, b)| a * b).sum()
    }

    /// `C_ijk ∇_j f R_ik`
    pub fn cotton_grad_ricci(&self) -> f64 {
        let n = self.curv.n;
        let up = self.fj.gradient_up(&self.curv);
        let ric_up = self.curv.ricci_up();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    s += self.cotton[(i * n + j) * n + k] * up[j] * ric_up[i * n + k];
                }
            }
        }
        s
    }

    pub fn radial_weyl_norm(&self) -> f64 {
        conformal::radial_weyl_norm(&self.curv, &self.weyl, &self.fj.gradient)
    }

    pub fn breakdown(&self, kappa: f64) -> BochnerBreakdown {
        let n = self.n();
        let f = self.fj.value;
        let r = self.curv.scalar;
        let (rc2, rc3) = traceless_invariants(&self.curv);
        let lhs = self.half_div();
        let term_cotton = (n - 2.0) / (n - 1.0) * f * self.cotton_norm_sq();
        let term_gradric = f * self.nabla_ric_norm_sq();
        let term_kappa = n * kappa / (n - 1.0) * rc2;
        let term_cubic = f * (2.0 * r * rc2 / (n - 1.0) + 2.0 * n * rc3 / (n - 2.0));
        let term_weyl_cotton = -(n - 2.0) / (n - 1.0) * self.weyl_cotton();
        let term_weyl_ricci = -2.0 * f * self.weyl_ricci();
        let residual =
            lhs - (term_cotton + term_gradric + term_kappa + term_cubic + term_weyl_cotton + term_weyl_ricci);
        BochnerBreakdown {
            lhs,
            term_cotton,
            term_gradric,
            term_kappa,
            term_cubic,
            term_weyl_cotton,
            term_weyl_ricci,
            residual,
        }
    }

    /// Largest magnitude among the cubic sub-terms `2fR|Ric̊|²/(n−1)` and
    /// `2nf tr(Ric̊³)/(n−2)`, which cancel on some spaces.
    fn cubic_parts_scale(&self) -> f64 {
        let n = self.n();
        let f = self.fj.value;
        let (rc2, rc3) = traceless_invariants(&self.curv);
        (2.0 * f * self.curv.scalar * rc2 / (n - 1.0))
            .abs()
            .max((2.0 * n * f * rc3 / (n - 2.0)).abs())
    }

    /// Right side of the zero-radial-Weyl specialization.
    pub fn eq313_rhs(&self, kappa: f64) -> (f64, f64) {
        let n = self.n();
        let f = self.fj.value;
        let (rc2, rc3) = traceless_invariants(&self.curv);
        let terms = [
            f * self.cotton_norm_sq() / (n - 1.0),
            f * self.nabla_ric_norm_sq(),
            n * kappa / (n - 1.0) * rc2,
            2.0 * f * self.curv.scalar * rc2 / (n - 1.0),
            2.0 * n * f * rc3 / (n - 2.0),
        ];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        (terms.iter().sum(), scale)
    }

    /// Integrand of the integral inequality, with the Okumura bound applied
    /// to the cubic term.
    pub fn eq315_integrand(&self, kappa: f64) -> f64 {
        let n = self.n();
        let f = self.fj.value;
        let rc2 = self.traceless_norm_sq();
        let rc = rc2.max(0.0).sqrt();
        let s = (n * (n - 1.0)).sqrt();
        (self.cotton_norm_sq() / (n - 1.0) + self.nabla_ric_norm_sq()) * f
            + n * kappa / (n - 1.0) * rc2
            + 2.0 * n / s * rc2 * (self.curv.scalar / s - rc) * f
    }
}

/// `(|Ric̊|², tr(Ric̊³))` with indices raised by the metric.
pub fn traceless_invariants(curv: &PointCurvature) -> (f64, f64) {
    let n = curv.n;
    let a = matmul(n, &curv.ginv, &curv.traceless_ricci());
    let a2 = matmul(n, &a, &a);
    (trace(n, &a2), trace(n, &matmul(n, &a2, &a)))
}

/// `W_ijkl R^ik R^jl`
pub fn weyl_ricci_contraction(curv: &PointCurvature, w: &[f64]) -> f64 {
    let n = curv.n;
    let ru = curv.ricci_up();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let rik = ru[i * n + k];
                if rik == 0.0 {
                    continue;
                }
                for l in 0..n {
                    s += w[((i * n + j) * n + k) * n + l] * rik * ru[j * n + l];
                }
            }
        }
    }
    s
}

/// `∇_i(f C_ijk R_jk)`, by differencing the covector `f C_ijk R^jk`.
pub fn div_f_cotton_ricci(chart: &Chart, f: &ScalarField, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let n = chart.dim();
    let field = |y: &[f64]| -> Result<Vec<f64>> {
        let c = PointCurvature::at(chart, y, cfg, Depth::Curvature)?;
        let nab = vstatic::nabla_ricci(chart, &c, cfg)?;
        let cot = conformal::cotton_from(&c, &nab);
        let ru = c.ricci_up();
        let fy = f.value(y);
        Ok((0..n)
            .map(|i| {
                let mut s = 0.0;
                for jk in 0..n * n {
                    s += cot[i * n * n + jk] * ru[jk];
                }
                fy * s
            })
            .collect())
    };
    let curv = PointCurvature::at(chart, point, cfg, Depth::Curvature)?;
    let mut field = field;
    let value = field(point)?;
    let d1 = diff::jet1(&mut field, point, chart.domain(), cfg)?;
    let nab = covariant::nabla_from_partials(&curv, 1, &value, &d1);
    Ok(curv.ginv.iter().zip(&nab).map(|(a, b)| a * b).sum())
}

/// `½ div(f∇|Ric|²)` for the triple's potential.
pub fn div_f_grad_ricnorm(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    Ok(BochnerPoint::at(&triple.chart, &triple.potential.f, point, cfg)?.half_div())
}

/// A chart whose scalar curvature was found constant over a set of points.
#[derive(Debug, Clone, Copy)]
pub struct ConstantCurvatureChart<'a> {
    chart: &'a Chart,
    scalar: f64,
    spread: f64,
}

impl<'a> ConstantCurvatureChart<'a> {
    pub fn verify(chart: &'a Chart, points: &[Vec<f64>], cfg: &DiffConfig) -> Result<Self> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in points {
            let r = PointCurvature::at(chart, p, cfg, Depth::Curvature)?.scalar;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let spread = hi - lo;
        if !(spread <= CONSTANT_R_LIMIT) {
            return Err(GeometryError::NonConstantScalarCurvature {
                spread,
                limit: CONSTANT_R_LIMIT,
            });
        }
        Ok(Self {
            chart,
            scalar: 0.5 * (lo + hi),
            spread,
        })
    }

    pub fn chart(&self) -> &'a Chart {
        self.chart
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }
}

pub(crate) fn lemma2_parts(bp: &BochnerPoint, div_term: f64) -> Residual {
    let n = bp.n();
    let f = bp.fj.value;
    let r = bp.curv.scalar;
    let a = bp.curv.ricci_endomorphism();
    let tr_ric3 = trace(bp.curv.n, &matmul(bp.curv.n, &matmul(bp.curv.n, &a, &a), &a));
    let lhs = 2.0 * bp.half_div();
    let terms = [
        -f * bp.cotton_norm_sq(),
        2.0 * f * bp.nabla_ric_norm_sq(),
        bp.grad_f_dot_grad_ricnorm(),
        2.0 * n / (n - 2.0) * f * tr_ric3,
        -(4.0 * n - 2.0) / ((n - 1.0) * (n - 2.0)) * f * r * bp.traceless_norm_sq(),
        -2.0 / (n * (n - 2.0)) * f * r * r * r,
        2.0 * div_term,
        2.0 * bp.cotton_grad_ricci(),
        -2.0 * f * bp.weyl_ricci(),
    ];
    let scale = terms.iter().fold(lhs.abs(), |m, t| m.max(t.abs()));
    Residual::new((lhs - terms.iter().sum::<f64>()).abs(), scale)
}

pub(crate) fn lemma3_parts(bp: &BochnerPoint, kappa: f64, div_term: f64) -> Residual {
    let n = bp.n();
    let f = bp.fj.value;
    let lhs = bp.half_div();
    let terms = [
        -f * bp.cotton_norm_sq(),
        f * bp.nabla_ric_norm_sq(),
        bp.grad_f_dot_grad_ricnorm(),
        -n * kappa / (n - 1.0) * bp.traceless_norm_sq(),
        2.0 * div_term,
    ];
    let scale = terms.iter().fold(lhs.abs(), |m, t| m.max(t.abs()));
    Residual::new((lhs - terms.iter().sum::<f64>()).abs(), scale)
}

pub(crate) fn theorem2_parts(bp: &BochnerPoint, kappa: f64) -> (BochnerBreakdown, Residual) {
    let b = bp.breakdown(kappa);
    let scale = b.scale().max(bp.cubic_parts_scale());
    (b, Residual::new(b.residual.abs(), scale))
}

pub(crate) fn eq313_parts(bp: &BochnerPoint, kappa: f64) -> Residual {
    let lhs = bp.half_div();
    let (rhs, scale) = bp.eq313_rhs(kappa);
    Residual::new((lhs - rhs).abs(), scale.max(lhs.abs()))
}

pub(crate) fn eq312_parts(bp: &BochnerPoint) -> Residual {
    let n = bp.n();
    let f = bp.fj.value;
    let lhs = f * bp.weyl_ricci();
    let rhs = (n - 3.0) / (2.0 * (n - 1.0)) * f * bp.cotton_norm_sq();
    Residual::new((lhs - rhs).abs(), lhs.abs().max(rhs.abs()))
}

pub(crate) fn require_radial_weyl(identity: &'static str, bp: &BochnerPoint) -> Result<()> {
    let norm = bp.radial_weyl_norm();
    if !(norm <= RADIAL_WEYL_LIMIT) {
        return Err(GeometryError::HypothesisViolated {
            identity,
            detail: format!("radial Weyl norm {norm:.3e} exceeds {RADIAL_WEYL_LIMIT:.0e}"),
        });
    }
    Ok(())
}

fn vstatic_point(triple: &VStaticTriple, identity: &'static str, point: &[f64], cfg: &DiffConfig) -> Result<BochnerPoint> {
    let bp = BochnerPoint::at(&triple.chart, &triple.potential.f, point, cfg)?;
    vstatic::require_vstatic(identity, &bp.curv, &bp.fj, triple.potential.kappa)?;
    Ok(bp)
}

/// `|div(f∇|Ric|²) − RHS|` for any smooth `f` on a chart of constant scalar
/// curvature.
pub fn lemma2_residual(chart: &ConstantCurvatureChart<'_>, f: &ScalarField, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let bp = BochnerPoint::at(chart.chart(), f, point, cfg)?;
    let div = div_f_cotton_ricci(chart.chart(), f, point, cfg)?;
    Ok(lemma2_parts(&bp, div).abs)
}

pub fn lemma3_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let bp = vstatic_point(triple, "lemma3", point, cfg)?;
    let div = div_f_cotton_ricci(&triple.chart, &triple.potential.f, point, cfg)?;
    Ok(lemma3_parts(&bp, triple.potential.kappa, div).abs)
}

pub fn theorem2_breakdown(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<BochnerBreakdown> {
    let bp = vstatic_point(triple, "theorem2", point, cfg)?;
    Ok(bp.breakdown(triple.potential.kappa))
}

pub fn radial_weyl_specialization_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let bp = vstatic_point(triple, "eq313", point, cfg)?;
    require_radial_weyl("eq313", &bp)?;
    Ok(eq313_parts(&bp, triple.potential.kappa).abs)
}

pub fn eq312_residual(triple: &VStaticTriple, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    let n = triple.chart.dim();
    if n < 4 {
        return Err(GeometryError::DimensionUnsupported { n, min: 4 });
    }
    let bp = vstatic_point(triple, "eq312", point, cfg)?;
    require_radial_weyl("eq312", &bp)?;
    Ok(eq312_parts(&bp).abs)
}

/// `tr(Ric̊³) + (n−2)/√(n(n−1)) |Ric̊|³`, nonnegative on every metric.
pub fn okumura_gap_from(curv: &PointCurvature) -> f64 {
    let n = curv.n as f64;
    let (rc2, rc3) = traceless_invariants(curv);
    rc3 + (n - 2.0) / (n * (n - 1.0)).sqrt() * rc2.max(0.0).powf(1.5)
}

/// `R²/(n(n−1)) − |Ric̊|²`
pub fn pinching_gap_from(curv: &PointCurvature) -> f64 {
    let n = curv.n as f64;
    curv.scalar * curv.scalar / (n * (n - 1.0)) - traceless_invariants(curv).0
}

pub fn okumura_gap(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    Ok(okumura_gap_from(&PointCurvature::at(chart, point, cfg, Depth::Curvature)?))
}

pub fn pinching_gap(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    Ok(pinching_gap_from(&PointCurvature::at(chart, point, cfg, Depth::Curvature)?))
}

/// `R_ij R_jk R_ik − R_ijkl R_jl R_ik` against
/// `R|Ric̊|²/(n−1) + n tr(Ric̊³)/(n−2) − W_ijkl R_ik R_jl`.
pub(crate) fn lemma4_parts(curv: &PointCurvature) -> Residual {
    let n = curv.n;
    let nf = n as f64;
    let a = curv.ricci_endomorphism();
    let tr3 = trace(n, &matmul(n, &matmul(n, &a, &a), &a));
    let rm_rr = rm_ricci_contraction(curv);
    let (rc2, rc3) = traceless_invariants(curv);
    let w = conformal::weyl_from(curv);
    let wrr = weyl_ricci_contraction(curv, &w);
    let lhs = [tr3, -rm_rr];
    let rhs = [curv.scalar * rc2 / (nf - 1.0), nf * rc3 / (nf - 2.0), -wrr];
    let scale = lhs.iter().chain(&rhs).fold(0.0f64, |m, t| m.max(t.abs()));
    Residual::new((lhs.iter().sum::<f64>() - rhs.iter().sum::<f64>()).abs(), scale)
}

/// `R_ijkl R^ik R^jl`
fn rm_ricci_contraction(curv: &PointCurvature) -> f64 {
    weyl_ricci_contraction(curv, &curv.riemann)
}

pub fn lemma4_residual(chart: &Chart, point: &[f64], cfg: &DiffConfig) -> Result<f64> {
    Ok(lemma4_parts(&PointCurvature::at(chart, point, cfg, Depth::Curvature)?).abs)
}

/// The two sides of the Berger identity for a symmetric 2-tensor field.
#[derive(Debug, Clone)]
pub struct BergerValues {
    /// `(∇_i∇_j T_ik − ∇_j∇_i T_ik) T_jk`
    pub commutator: f64,
    /// `Σ_{i<j} R_ijij (λ_i − λ_j)²` in the eigenbasis of `T`.
    pub eigen_sum: f64,
    pub spectral: SpectralData,
}

pub fn berger_check<F>(chart: &Chart, point: &[f64], tensor: F, cfg: &DiffConfig) -> Result<BergerValues>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let curv = PointCurvature::at(chart, point, cfg, Depth::WithConnectionDerivative)?;
    let jet = covariant::covariant_jet2(tensor, 2, chart, &curv, cfg)?;
    berger_from(&curv, &jet.value, &jet.nabla2)
}

pub(crate) fn berger_from(curv: &PointCurvature, t: &[f64], nabla2: &[f64]) -> Result<BergerValues> {
    let n = curv.n;
    let nn = n * n;
    let n2 = |a: usize, b: usize, c: usize, d: usize| nabla2[(a * n + b) * nn + c * n + d];
    let t_up = raise_all(&curv.ginv, n, 2, t);
    let mut commutator = 0.0;
    for j in 0..n {
        for k in 0..n {
            let mut q = 0.0;
            for i in 0..n {
                for a in 0..n {
                    let gia = curv.ginv[i * n + a];
                    if gia == 0.0 {
                        continue;
                    }
                    q += gia * (n2(i, j, a, k) - n2(j, i, a, k));
                }
            }
            commutator += q * t_up[j * n + k];
        }
    }
    let spectral = SpectralData::new(n, &curv.g, t)?;
    let mut eigen_sum = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            let (u, v) = (&spectral.basis[a], &spectral.basis[b]);
            let mut k = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let uv = u[i] * v[j];
                    if uv == 0.0 {
                        continue;
                    }
                    for p in 0..n {
                        for q in 0..n {
                            k += curv.r(i, j, p, q) * uv * u[p] * v[q];
                        }
                    }
                }
            }
            let d = spectral.eigenvalues[a] - spectral.eigenvalues[b];
            eigen_sum += k * d * d;
        }
    }
    Ok(BergerValues {
        commutator,
        eigen_sum,
        spectral,
    })
}
