//! Named identity checks evaluated over a sample grid.
//!
//! Every check reduces a point to an absolute residual, a relative residual
//! `abs / max(scale, floor)` and a signed value (the residual itself, or the
//! gap for the inequality checks). A run passes when no point errored and
//! `max_rel ≤ tolerance` or `max_abs ≤ floor`.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::bochner::{self, BochnerPoint, ConstantCurvatureChart};
use crate::catalog::CatalogSpace;
use crate::conformal;
use crate::covariant::{self, RicciJet};
use crate::curvature::{Depth, PointCurvature};
use crate::diff::{self, DiffConfig};
use crate::error::{GeometryError, Result};
use crate::grid::SampleGrid;
use crate::quadrature::{self, Integrand, RadialIntegral};
use crate::tensor::max_abs;
use crate::vstatic::{self, PotentialJet, Residual};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckId {
    VStatic,
    Trace,
    Traceless,
    Lemma1,
    Decomposition,
    Lemma2,
    Lemma3,
    Theorem2,
    Eq312,
    Eq313,
    Lemma4,
    Okumura,
    Pinching,
    Berger,
    WeylIdentities,
    Integral,
}

/// What a check needs from a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Needs {
    Chart,
    ScalarField,
    Potential,
    Warped,
}

impl CheckId {
    pub const ALL: [CheckId; 16] = [
        CheckId::VStatic,
        CheckId::Trace,
        CheckId::Traceless,
        CheckId::Lemma1,
        CheckId::Decomposition,
        CheckId::Lemma2,
        CheckId::Lemma3,
        CheckId::Theorem2,
        CheckId::Eq312,
        CheckId::Eq313,
        CheckId::Lemma4,
        CheckId::Okumura,
        CheckId::Pinching,
        CheckId::Berger,
        CheckId::WeylIdentities,
        CheckId::Integral,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckId::VStatic => "vstatic",
            CheckId::Trace => "trace",
            CheckId::Traceless => "traceless",
            CheckId::Lemma1 => "lemma1",
            CheckId::Decomposition => "decomposition",
            CheckId::Lemma2 => "lemma2",
            CheckId::Lemma3 => "lemma3",
            CheckId::Theorem2 => "theorem2",
            CheckId::Eq312 => "eq312",
            CheckId::Eq313 => "eq313",
            CheckId::Lemma4 => "lemma4",
            CheckId::Okumura => "okumura",
            CheckId::Pinching => "pinching",
            CheckId::Berger => "berger",
            CheckId::WeylIdentities => "weyl-identities",
            CheckId::Integral => "integral",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            CheckId::VStatic => "-(Δf)g + Hess f - f Ric - κg = 0",
            CheckId::Trace => "Δf + Rf/(n-1) + nκ/(n-1) = 0",
            CheckId::Traceless => "f Ric̊ = Hess f - (Δf/n) g",
            CheckId::Lemma1 => "f(∇_i R_jk - ∇_j R_ik) against curvature and ∇f terms",
            CheckId::Decomposition => "f C = T + W(·,·,·,∇f)",
            CheckId::Lemma2 => "div(f∇|Ric|²) expansion on constant scalar curvature",
            CheckId::Lemma3 => "½div(f∇|Ric|²) for V-static metrics with the Cotton divergence",
            CheckId::Theorem2 => "Böchner formula for ½div(f∇|Ric|²)",
            CheckId::Eq312 => "f W_ijkl R_ik R_jl = (n-3)/(2(n-1)) f|C|² under zero radial Weyl",
            CheckId::Eq313 => "Böchner formula under zero radial Weyl",
            CheckId::Lemma4 => "cubic Ricci/Riemann contraction identity",
            CheckId::Okumura => "tr(Ric̊³) + (n-2)/√(n(n-1)) |Ric̊|³ ≥ 0",
            CheckId::Pinching => "R²/(n(n-1)) - |Ric̊|² ≥ 0",
            CheckId::Berger => "commutator contraction = Σ K_ij (λ_i - λ_j)² for T = Ric",
            CheckId::WeylIdentities => "Weyl closure and trace, Cotton symmetries, C = -(n-2)/(n-3) div W",
            CheckId::Integral => "∫ div(f∇|Ric|²) = 0 over a warped band",
        }
    }

    /// Relative tolerance on the worst point.
    pub fn tolerance(&self) -> f64 {
        match self {
            CheckId::VStatic | CheckId::Trace | CheckId::Traceless | CheckId::Lemma4 => 1e-6,
            CheckId::Okumura | CheckId::Pinching => 0.0,
            _ => 1e-4,
        }
    }

    /// Absolute residual below which a run passes regardless of scale; also
    /// the lower bound on the scale used for relative residuals.
    pub fn abs_floor(&self) -> f64 {
        match self {
            CheckId::Okumura => 1e-9,
            CheckId::Theorem2 => 1e-8,
            CheckId::Integral => 1e-5,
            _ => 1e-6,
        }
    }

    fn needs(&self) -> Needs {
        match self {
            CheckId::Lemma4 | CheckId::Okumura | CheckId::Pinching | CheckId::Berger | CheckId::WeylIdentities => {
                Needs::Chart
            }
            CheckId::Lemma2 => Needs::ScalarField,
            CheckId::Integral => Needs::Warped,
            _ => Needs::Potential,
        }
    }

    /// Errors when the check cannot run on the space at all.
    pub fn applicable(&self, space: &CatalogSpace) -> Result<()> {
        let missing = |what: &str| {
            Err(GeometryError::InvalidParameter(format!(
                "check '{self}' needs {what}; {} has none",
                space.id
            )))
        };
        match self.needs() {
            Needs::Chart => {}
            Needs::ScalarField if space.scalar_field().is_none() => return missing("a scalar field"),
            Needs::Potential if space.triple.is_none() => return missing("a V-static potential"),
            Needs::Warped if space.warped.is_none() || space.triple.is_none() => {
                return missing("a warped-product potential")
            }
            _ => {}
        }
        if *self == CheckId::Eq312 && space.n < 4 {
            return Err(GeometryError::DimensionUnsupported { n: space.n, min: 4 });
        }
        Ok(())
    }

    /// Checks that can run on a space, in canonical order.
    pub fn applicable_to(space: &CatalogSpace) -> Vec<CheckId> {
        Self::ALL
            .into_iter()
            .filter(|c| c.applicable(space).is_ok())
            .collect()
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| GeometryError::InvalidParameter(format!("unknown check '{s}'")))
    }
}

/// Residuals of one check at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub abs: f64,
    pub rel: f64,
    /// Signed quantity reported as min/max: the gap for inequalities, the
    /// absolute residual otherwise.
    pub value: f64,
}

impl Outcome {
    fn residual(r: Residual, floor: f64) -> Self {
        Self {
            abs: r.abs,
            rel: r.relative(floor),
            value: r.abs,
        }
    }

    /// An inequality `gap ≥ 0`; the residual is the violation.
    fn gap(gap: f64, scale: f64, floor: f64) -> Self {
        let abs = if gap.is_nan() { f64::NAN } else { (-gap).max(0.0) };
        Self {
            abs,
            rel: abs / scale.max(floor),
            value: gap,
        }
    }

    pub fn passes(&self, check: CheckId) -> bool {
        self.rel <= check.tolerance() || self.abs <= check.abs_floor()
    }
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub index: usize,
    pub point: Vec<f64>,
    pub outcome: std::result::Result<Outcome, GeometryError>,
}

/// Everything a report needs about one check over one grid.
#[derive(Debug, Clone)]
pub struct CheckRun {
    pub check: CheckId,
    pub grid: String,
    pub points: Vec<PointResult>,
    pub integral: Option<RadialIntegral>,
    pub runtime_ms: u64,
}

impl CheckRun {
    pub fn outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.points.iter().filter_map(|p| p.outcome.as_ref().ok())
    }

    pub fn errors(&self) -> usize {
        self.points.iter().filter(|p| p.outcome.is_err()).count()
    }

    pub fn max_abs(&self) -> f64 {
        self.outcomes().fold(0.0, |m, o| nan_max(m, o.abs))
    }

    pub fn mean_abs(&self) -> f64 {
        let (s, c) = self.outcomes().fold((0.0, 0usize), |(s, c), o| (s + o.abs, c + 1));
        if c == 0 {
            f64::NAN
        } else {
            s / c as f64
        }
    }

    pub fn max_rel(&self) -> f64 {
        self.outcomes().fold(0.0, |m, o| nan_max(m, o.rel))
    }

    pub fn min_value(&self) -> f64 {
        self.outcomes().map(|o| o.value).fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.outcomes().map(|o| o.value).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn pass(&self) -> bool {
        let evaluated = self.outcomes().next().is_some();
        evaluated
            && self.errors() == 0
            && (self.max_rel() <= self.check.tolerance() || self.max_abs() <= self.check.abs_floor())
    }

    /// Points that errored or individually exceed both thresholds, in grid
    /// order.
    pub fn failing_points(&self) -> impl Iterator<Item = &PointResult> {
        let check = self.check;
        self.points.iter().filter(move |p| match &p.outcome {
            Ok(o) => !o.passes(check),
            Err(_) => true,
        })
    }
}

/// NaN-propagating maximum.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Quadrature settings for the `integral` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralConfig {
    pub order: usize,
    pub delta: f64,
}

impl Default for IntegralConfig {
    fn default() -> Self {
        Self {
            order: quadrature::DEFAULT_ORDER,
            delta: quadrature::DEFAULT_DELTA,
        }
    }
}

/// Runs one check over a grid. Points are evaluated in parallel and
/// collected in grid order.
pub fn run_check(
    space: &CatalogSpace,
    check: CheckId,
    grid: &SampleGrid,
    cfg: &DiffConfig,
    integral: &IntegralConfig,
) -> Result<CheckRun> {
    check.applicable(space)?;
    let start = Instant::now();
    if check == CheckId::Integral {
        let r = quadrature::integrate_radial(space, Integrand::DivFGradRicnorm, integral.order, integral.delta, cfg);
        let outcome = r.clone().map(|r| Outcome {
            abs: r.value.abs(),
            rel: r.value.abs() / r.abs_value.max(check.abs_floor()),
            value: r.value,
        });
        return Ok(CheckRun {
            check,
            grid: format!("gl{}", integral.order),
            integral: r.ok(),
            points: vec![PointResult {
                index: 0,
                point: Vec::new(),
                outcome,
            }],
            runtime_ms: start.elapsed().as_millis() as u64,
        });
    }

    let constant_r = if check == CheckId::Lemma2 {
        Some(ConstantCurvatureChart::verify(&space.chart, &grid.points, cfg))
    } else {
        None
    };
    let points = grid
        .points
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let outcome = match &constant_r {
                Some(Err(e)) => Err(e.clone()),
                Some(Ok(cc)) => lemma2_point(space, cc, p, cfg),
                None => evaluate(space, check, p, cfg),
            };
            PointResult {
                index,
                point: p.clone(),
                outcome,
            }
        })
        .collect();
    Ok(CheckRun {
        check,
        grid: grid.describe(),
        points,
        integral: None,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

fn lemma2_point(
    space: &CatalogSpace,
    cc: &ConstantCurvatureChart<'_>,
    p: &[f64],
    cfg: &DiffConfig,
) -> Result<Outcome> {
    let f = space.scalar_field().expect("applicability checked");
    let bp = BochnerPoint::at(&space.chart, f, p, cfg)?;
    let div = bochner::div_f_cotton_ricci(cc.chart(), f, p, cfg)?;
    Ok(Outcome::residual(bochner::lemma2_parts(&bp, div), CheckId::Lemma2.abs_floor()))
}

/// One check at one point.
pub fn evaluate(space: &CatalogSpace, check: CheckId, p: &[f64], cfg: &DiffConfig) -> Result<Outcome> {
    let floor = check.abs_floor();
    let chart = &space.chart;
    let res = |r: Residual| Ok(Outcome::residual(r, floor));
    match check {
        CheckId::VStatic | CheckId::Trace | CheckId::Traceless => {
            let t = space.triple.as_ref().expect("applicability checked");
            let curv = PointCurvature::at(chart, p, cfg, Depth::Curvature)?;
            let fj = PotentialJet::at(&t.potential.f, chart, &curv, cfg)?;
            let k = t.potential.kappa;
            res(match check {
                CheckId::VStatic => vstatic::vstatic_parts(&curv, &fj, k),
                CheckId::Trace => vstatic::trace_parts(&curv, &fj, k),
                _ => vstatic::traceless_parts(&curv, &fj),
            })
        }
        CheckId::Lemma1 | CheckId::Decomposition => {
            let t = space.triple.as_ref().expect("applicability checked");
            let curv = PointCurvature::at(chart, p, cfg, Depth::Curvature)?;
            let fj = PotentialJet::at(&t.potential.f, chart, &curv, cfg)?;
            vstatic::require_vstatic(check.as_str(), &curv, &fj, t.potential.kappa)?;
            let nab = vstatic::nabla_ricci(chart, &curv, cfg)?;
            res(if check == CheckId::Lemma1 {
                vstatic::lemma1_parts(&curv, &fj, &nab)
            } else {
                vstatic::decomposition_parts(&curv, &fj, &conformal::cotton_from(&curv, &nab))
            })
        }
        CheckId::Lemma2 => unreachable!("lemma2 needs the grid-wide curvature check"),
        CheckId::Lemma3 | CheckId::Theorem2 | CheckId::Eq312 | CheckId::Eq313 => {
            let t = space.triple.as_ref().expect("applicability checked");
            let k = t.potential.kappa;
            let bp = BochnerPoint::at(chart, &t.potential.f, p, cfg)?;
            vstatic::require_vstatic(check.as_str(), &bp.curv, &bp.fj, k)?;
            match check {
                CheckId::Lemma3 => {
                    let div = bochner::div_f_cotton_ricci(chart, &t.potential.f, p, cfg)?;
                    res(bochner::lemma3_parts(&bp, k, div))
                }
                CheckId::Theorem2 => res(bochner::theorem2_parts(&bp, k).1),
                CheckId::Eq313 => {
                    bochner::require_radial_weyl("eq313", &bp)?;
                    res(bochner::eq313_parts(&bp, k))
                }
                _ => {
                    bochner::require_radial_weyl("eq312", &bp)?;
                    res(bochner::eq312_parts(&bp))
                }
            }
        }
        CheckId::Lemma4 => res(bochner::lemma4_parts(&PointCurvature::at(chart, p, cfg, Depth::Curvature)?)),
        CheckId::Okumura | CheckId::Pinching => {
            let curv = PointCurvature::at(chart, p, cfg, Depth::Curvature)?;
            let n = curv.n as f64;
            let rc2 = bochner::traceless_invariants(&curv).0;
            Ok(if check == CheckId::Okumura {
                Outcome::gap(bochner::okumura_gap_from(&curv), rc2.max(0.0).powf(1.5), floor)
            } else {
                let scale = curv.scalar * curv.scalar / (n * (n - 1.0)) + rc2;
                Outcome::gap(bochner::pinching_gap_from(&curv), scale, floor)
            })
        }
        CheckId::Berger => {
            let rj = RicciJet::at(chart, p, cfg)?;
            let b = bochner::berger_from(&rj.curv, &rj.curv.ricci, &rj.nabla2)?;
            res(Residual::new(
                (b.commutator - b.eigen_sum).abs(),
                b.commutator.abs().max(b.eigen_sum.abs()),
            ))
        }
        CheckId::WeylIdentities => weyl_identities(chart, p, cfg),
        CheckId::Integral => unreachable!("the integral check is not pointwise"),
    }
}

/// Worst of the Weyl/Cotton identities, each normalised by its own scale.
fn weyl_identities(chart: &crate::chart::Chart, p: &[f64], cfg: &DiffConfig) -> Result<Outcome> {
    let floor = CheckId::WeylIdentities.abs_floor();
    let curv = PointCurvature::at(chart, p, cfg, Depth::Curvature)?;
    let w = conformal::weyl_from(&curv);
    let rm_scale = max_abs(&curv.riemann);
    let d1r = diff::jet1(covariant::ricci_field(chart, cfg), p, chart.domain(), cfg)?;
    let nab_r = covariant::nabla_from_partials(&curv, 2, &curv.ricci, &d1r);
    let c = conformal::cotton_from(&curv, &nab_r);
    let mut parts = vec![
        Residual::new(conformal::decomposition_closure(&curv, &w), rm_scale),
        Residual::new(conformal::weyl_trace_defect(&curv, &w), rm_scale),
        Residual::new(conformal::cotton_defect(&curv, &c), max_abs(&nab_r)),
    ];
    if curv.n >= 4 {
        let d1w = diff::jet1(conformal::weyl_field(chart, cfg), p, chart.domain(), cfg)?;
        let nab_w = covariant::nabla_from_partials(&curv, 4, &w, &d1w);
        let ratio = (curv.n as f64 - 2.0) / (curv.n as f64 - 3.0);
        parts.push(Residual::new(
            conformal::cotton_weyl_from(&curv, &c, &nab_w),
            max_abs(&c).max(ratio * max_abs(&nab_w)),
        ));
    }
    Ok(parts.iter().fold(
        Outcome {
            abs: 0.0,
            rel: 0.0,
            value: 0.0,
        },
        |acc, r| {
            let o = Outcome::residual(*r, floor);
            Outcome {
                abs: nan_max(acc.abs, o.abs),
                rel: nan_max(acc.rel, o.rel),
                value: nan_max(acc.value, o.value),
            }
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, Params, SpaceId};

    #[test]
    fn ids_round_trip() {
        for c in CheckId::ALL {
            assert_eq!(c.as_str().parse::<CheckId>().unwrap(), c);
        }
        assert!("theorem3".parse::<CheckId>().is_err());
    }

    #[test]
    fn applicability_follows_space_data() {
        let p = catalog::build(SpaceId::PerturbedFlat, 3, &Params::default()).unwrap();
        let ids = CheckId::applicable_to(&p);
        assert_eq!(
            ids,
            vec![
                CheckId::Lemma4,
                CheckId::Okumura,
                CheckId::Pinching,
                CheckId::Berger,
                CheckId::WeylIdentities
            ]
        );
        let h = catalog::build(SpaceId::Hemisphere, 3, &Params::default()).unwrap();
        assert!(CheckId::Eq312.applicable(&h).is_err());
        assert!(CheckId::Integral.applicable(&h).is_ok());
    }

    #[test]
    fn gap_outcome_counts_only_violation() {
        let ok = Outcome::gap(2.0, 1.0, 1e-9);
        assert_eq!(ok.abs, 0.0);
        let bad = Outcome::gap(-0.5, 1.0, 1e-9);
        assert_eq!(bad.abs, 0.5);
        assert!(!bad.passes(CheckId::Okumura));
    }

    #[test]
    fn hemisphere_vstatic_run_passes() {
        let h = catalog::build(SpaceId::Hemisphere, 3, &Params::default()).unwrap();
        let grid = SampleGrid::radial(&h.chart, 8, 4);
        let run = run_check(&h, CheckId::VStatic, &grid, &DiffConfig::default(), &IntegralConfig::default()).unwrap();
        assert_eq!(run.points.len(), 128);
        assert!(run.pass(), "max_abs {}", run.max_abs());
        assert!(run.max_abs() <= 1e-7);
    }
}
