//! Ready-made example spaces: the static and Miao–Tam triples, a product of
//! spheres with nonvanishing Weyl tensor, and seeded perturbations of flat
//! space.

mod perturbed;
mod product;
mod roots;
mod warped;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use perturbed::{unit_draw, PerturbedFlat, DEFAULT_AMPLITUDE, DEFAULT_SEED};
pub use product::{product_test_function, ProductSpheres, DEFAULT_RADII};
pub use roots::{check_mass, mass_bound, peak, schwarzschild_roots};
pub use warped::{
    schwarzschild_v, warped_curvature, Arclength, SchwarzschildProfile, WarpedCurvature, WarpedModel,
    WarpedProfile,
};

use crate::chart::{Backend, Chart, Interval, DEFAULT_MARGIN};
use crate::conformal;
use crate::curvature::{Depth, PointCurvature};
use crate::diff::{DiffConfig, ScalarField};
use crate::error::{GeometryError, Result};
use crate::tensor::max_abs;
use crate::vstatic::{self, Potential, PotentialJet, VStaticTriple};

/// Largest dimension the general chart engine accepts.
pub const MAX_DIM: usize = 6;
pub const DEFAULT_BALL_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceId {
    Hemisphere,
    Cylinder,
    Schwarzschild,
    EuclideanBall,
    SphericalBall,
    ProductSpheres,
    PerturbedFlat,
}

impl SpaceId {
    pub const ALL: [SpaceId; 7] = [
        SpaceId::Hemisphere,
        SpaceId::Cylinder,
        SpaceId::Schwarzschild,
        SpaceId::EuclideanBall,
        SpaceId::SphericalBall,
        SpaceId::ProductSpheres,
        SpaceId::PerturbedFlat,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SpaceId::Hemisphere => "hemisphere",
            SpaceId::Cylinder => "cylinder",
            SpaceId::Schwarzschild => "schwarzschild",
            SpaceId::EuclideanBall => "euclidean_ball",
            SpaceId::SphericalBall => "spherical_ball",
            SpaceId::ProductSpheres => "product_spheres",
            SpaceId::PerturbedFlat => "perturbed_flat",
        }
    }

    /// Whether the space comes with a V-static potential.
    pub fn is_vstatic(&self) -> bool {
        !matches!(self, SpaceId::ProductSpheres | SpaceId::PerturbedFlat)
    }

    pub fn is_warped(&self) -> bool {
        self.is_vstatic()
    }

    pub fn dimensions(&self) -> std::ops::RangeInclusive<usize> {
        match self {
            SpaceId::ProductSpheres => 4..=4,
            _ => 3..=MAX_DIM,
        }
    }
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpaceId {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        SpaceId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| GeometryError::InvalidParameter(format!("unknown space '{s}'")))
    }
}

/// Optional parameters; unset ones take the space's defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Params {
    pub m: Option<f64>,
    pub r0: Option<f64>,
    pub radii: Option<(f64, f64)>,
    pub seed: Option<u64>,
    pub amplitude: Option<f64>,
}

impl Params {
    pub fn mass(m: f64) -> Self {
        Self {
            m: Some(m),
            ..Self::default()
        }
    }

    fn set_names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.m.is_some() {
            v.push("m");
        }
        if self.r0.is_some() {
            v.push("r0");
        }
        if self.radii.is_some() {
            v.push("radii");
        }
        if self.seed.is_some() {
            v.push("seed");
        }
        if self.amplitude.is_some() {
            v.push("amplitude");
        }
        v
    }
}

/// Constants a space claims about itself, verified when it is built.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Declared {
    pub scalar_curvature: Option<f64>,
    pub kappa: Option<f64>,
    pub f_nonnegative: bool,
    pub conformally_flat: bool,
    pub bach_flat: bool,
}

/// Radial data of a warped-product space.
#[derive(Debug, Clone)]
pub struct WarpedInfo {
    pub profile: Arc<dyn WarpedProfile>,
    /// Full radial range; the potential vanishes at the ends that are
    /// boundaries.
    pub t_range: Interval,
}

/// A named example space.
#[derive(Debug, Clone)]
pub struct CatalogSpace {
    pub id: SpaceId,
    pub n: usize,
    /// Resolved parameters, in a fixed order.
    pub params: Vec<(&'static str, f64)>,
    pub chart: Chart,
    pub triple: Option<VStaticTriple>,
    /// Test function for spaces without a potential.
    pub test_f: Option<ScalarField>,
    pub declared: Declared,
    pub roots: Option<(f64, f64)>,
    pub warped: Option<WarpedInfo>,
}

impl CatalogSpace {
    /// The potential if there is one, else the test function.
    pub fn scalar_field(&self) -> Option<&ScalarField> {
        self.triple
            .as_ref()
            .map(|t| &t.potential.f)
            .or(self.test_f.as_ref())
    }

    pub fn kappa(&self) -> Option<f64> {
        self.triple.as_ref().map(|t| t.potential.kappa)
    }

    /// Switches the metric and potential to a differentiation backend.
    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.chart = self.chart.with_backend(backend);
        let fd = backend == Backend::FiniteDifference;
        if let Some(t) = self.triple.as_mut() {
            t.chart = self.chart.clone();
            if fd {
                t.potential.f = t.potential.f.clone().finite_difference_only();
            }
        }
        if fd {
            self.test_f = self.test_f.map(|f| f.finite_difference_only());
        }
        self
    }

    /// A few interior points spread along the first coordinate, others
    /// centred.
    pub fn probe_points(&self, count: usize) -> Vec<Vec<f64>> {
        let region = self.chart.sampling_region();
        (0..count)
            .map(|k| {
                let s = (k as f64 + 0.5) / count as f64;
                region
                    .iter()
                    .enumerate()
                    .map(|(i, iv)| {
                        if i == 0 {
                            iv.lo + s * iv.width()
                        } else {
                            // off-centre so no coordinate sits on a symmetry axis
                            iv.lo + (0.5 + 0.07 * i as f64) * iv.width()
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

fn radial_field(
    f: impl Fn(f64) -> [f64; 3] + Send + Sync + Clone + 'static,
    n: usize,
) -> ScalarField {
    let f1 = f.clone();
    let f2 = f.clone();
    ScalarField::new(move |x| f(x[0])[0]).with_partials(
        move |x| {
            let mut g = vec![0.0; n];
            g[0] = f1(x[0])[1];
            g
        },
        move |x| {
            let mut h = vec![0.0; n * n];
            h[0] = f2(x[0])[2];
            h
        },
    )
}

fn reject_params(id: SpaceId, params: &Params, allowed: &[&str]) -> Result<()> {
    for name in params.set_names() {
        if !allowed.contains(&name) {
            return Err(GeometryError::InvalidParameter(format!(
                "parameter '{name}' does not apply to {id}"
            )));
        }
    }
    Ok(())
}

/// Margin on the radial coordinate: the default, shrunk on narrow bands.
fn radial_margin(range: Interval) -> f64 {
    DEFAULT_MARGIN.min(0.25 * range.width())
}

/// Builds a space and verifies its declared constants.
pub fn build(id: SpaceId, n: usize, params: &Params) -> Result<CatalogSpace> {
    let space = build_unverified(id, n, params)?;
    verify_declared(&space, &DiffConfig::default())?;
    Ok(space)
}

/// Builds a space without the load-time checks.
pub fn build_unverified(id: SpaceId, n: usize, params: &Params) -> Result<CatalogSpace> {
    if !id.dimensions().contains(&n) {
        let r = id.dimensions();
        return Err(GeometryError::UnsupportedDimension {
            n,
            space: id.as_str().to_string(),
            supported: format!("{}..={}", r.start(), r.end()),
        });
    }
    let nf = n as f64;
    let einstein = Some(nf * (nf - 1.0));
    let static_flags = |r: Option<f64>, kappa: f64| Declared {
        scalar_curvature: r,
        kappa: Some(kappa),
        f_nonnegative: true,
        conformally_flat: true,
        bach_flat: true,
    };
    let warped = |profile: Arc<dyn WarpedProfile>, t_range: Interval, f: ScalarField, kappa: f64| {
        let chart = WarpedModel::chart(n, profile.clone(), t_range, radial_margin(t_range));
        let triple = VStaticTriple {
            chart: chart.clone(),
            potential: Potential::new(f, kappa),
            declared_scalar_curvature: None,
        };
        (chart, triple, WarpedInfo { profile, t_range })
    };

    let (chart, triple, info, declared, resolved, roots): (
        Chart,
        Option<VStaticTriple>,
        Option<WarpedInfo>,
        Declared,
        Vec<(&'static str, f64)>,
        Option<(f64, f64)>,
    ) = match id {
        SpaceId::Hemisphere => {
            reject_params(id, params, &[])?;
            let (c, t, w) = warped(
                Arc::new(Arclength(|t: f64| [t.sin(), t.cos(), -t.sin()])),
                Interval::new(0.0, PI / 2.0),
                radial_field(|t: f64| [t.cos(), -t.sin(), -t.cos()], n),
                0.0,
            );
            (c, Some(t), Some(w), static_flags(einstein, 0.0), vec![], None)
        }
        SpaceId::Cylinder => {
            reject_params(id, params, &[])?;
            let h = ((nf - 2.0) / nf).sqrt();
            let k = nf.sqrt();
            let (c, t, w) = warped(
                Arc::new(Arclength(move |_| [h, 0.0, 0.0])),
                Interval::new(0.0, PI / k),
                radial_field(
                    move |t: f64| [(k * t).sin(), k * (k * t).cos(), -nf * (k * t).sin()],
                    n,
                ),
                0.0,
            );
            (c, Some(t), Some(w), static_flags(einstein, 0.0), vec![], None)
        }
        SpaceId::Schwarzschild => {
            reject_params(id, params, &["m"])?;
            let m = params
                .m
                .ok_or_else(|| GeometryError::InvalidParameter("schwarzschild needs a mass m".into()))?;
            let (r1, r2) = schwarzschild_roots(n, m)?;
            let f = move |t: f64| {
                let [v, v1, v2] = schwarzschild_v(n, m, t);
                let s = v.max(0.0).sqrt();
                [s, v1 / (2.0 * s), v2 / (2.0 * s) - v1 * v1 / (4.0 * v * s)]
            };
            let (c, t, w) = warped(
                Arc::new(SchwarzschildProfile { n, m }),
                Interval::new(r1, r2),
                radial_field(f, n),
                0.0,
            );
            (c, Some(t), Some(w), static_flags(einstein, 0.0), vec![("m", m)], Some((r1, r2)))
        }
        SpaceId::EuclideanBall => {
            reject_params(id, params, &["r0"])?;
            let r0 = params.r0.unwrap_or(DEFAULT_BALL_RADIUS);
            if !(r0 > 0.0 && r0.is_finite()) {
                return Err(GeometryError::InvalidParameter(format!("r0 must be positive, got {r0}")));
            }
            let c0 = 2.0 * (nf - 1.0);
            let (c, t, w) = warped(
                Arc::new(Arclength(|t: f64| [t, 1.0, 0.0])),
                Interval::new(0.0, r0),
                radial_field(move |t: f64| [(r0 * r0 - t * t) / c0, -2.0 * t / c0, -2.0 / c0], n),
                1.0,
            );
            (c, Some(t), Some(w), static_flags(Some(0.0), 1.0), vec![("r0", r0)], None)
        }
        SpaceId::SphericalBall => {
            reject_params(id, params, &["r0"])?;
            let r0 = params.r0.unwrap_or(DEFAULT_BALL_RADIUS);
            if !(r0 > 0.0 && r0 < PI / 2.0) {
                return Err(GeometryError::InvalidParameter(format!(
                    "r0 must lie in (0, π/2), got {r0}"
                )));
            }
            let c0 = (nf - 1.0) * r0.cos();
            let (c, t, w) = warped(
                Arc::new(Arclength(|t: f64| [t.sin(), t.cos(), -t.sin()])),
                Interval::new(0.0, r0),
                radial_field(
                    move |t: f64| [(t.cos() - r0.cos()) / c0, -t.sin() / c0, -t.cos() / c0],
                    n,
                ),
                1.0,
            );
            (c, Some(t), Some(w), static_flags(einstein, 1.0), vec![("r0", r0)], None)
        }
        SpaceId::ProductSpheres => {
            reject_params(id, params, &["radii"])?;
            let (ra, rb) = params.radii.unwrap_or(DEFAULT_RADII);
            if !(ra > 0.0 && rb > 0.0) {
                return Err(GeometryError::InvalidParameter("radii must be positive".into()));
            }
            let p = ProductSpheres { ra, rb };
            let declared = Declared {
                scalar_curvature: Some(p.scalar_curvature()),
                ..Declared::default()
            };
            (p.chart(), None, None, declared, vec![("ra", ra), ("rb", rb)], None)
        }
        SpaceId::PerturbedFlat => {
            reject_params(id, params, &["seed", "amplitude"])?;
            let seed = params.seed.unwrap_or(DEFAULT_SEED);
            let amplitude = params.amplitude.unwrap_or(DEFAULT_AMPLITUDE);
            if !(amplitude >= 0.0 && amplitude * n as f64 <= 0.5) {
                return Err(GeometryError::InvalidParameter(format!(
                    "amplitude must lie in [0, {}] for n = {n}",
                    0.5 / n as f64
                )));
            }
            let chart = PerturbedFlat::new(n, seed, amplitude).chart();
            (
                chart,
                None,
                None,
                Declared::default(),
                vec![("seed", seed as f64), ("amplitude", amplitude)],
                None,
            )
        }
    };
    let triple = triple.map(|mut t| {
        t.declared_scalar_curvature = declared.scalar_curvature;
        t
    });
    let test_f = (id == SpaceId::ProductSpheres).then(product_test_function);
    Ok(CatalogSpace {
        id,
        n,
        params: resolved,
        chart,
        triple,
        test_f,
        declared,
        roots,
        warped: info,
    })
}

const LOAD_R_TOL: f64 = 1e-6;
const LOAD_VSTATIC_TOL: f64 = 1e-6;
const LOAD_WEYL_TOL: f64 = 1e-6;
const LOAD_BACH_TOL: f64 = 1e-4;

/// Re-derives the declared constants at a few probe points.
pub fn verify_declared(space: &CatalogSpace, cfg: &DiffConfig) -> Result<()> {
    let mismatch = |what: &str, expected: f64, computed: f64| GeometryError::DeclaredMismatch {
        what: format!("{} (n = {}): {what}", space.id, space.n),
        expected,
        computed,
    };
    let points = space.probe_points(3);
    for p in &points {
        let curv = PointCurvature::at(&space.chart, p, cfg, Depth::Curvature)?;
        if let Some(r) = space.declared.scalar_curvature {
            if !((curv.scalar - r).abs() <= LOAD_R_TOL) {
                return Err(mismatch("scalar curvature", r, curv.scalar));
            }
        }
        if let Some(t) = &space.triple {
            let fj = PotentialJet::at(&t.potential.f, &space.chart, &curv, cfg)?;
            let res = vstatic::vstatic_parts(&curv, &fj, t.potential.kappa).abs;
            if !(res <= LOAD_VSTATIC_TOL) {
                return Err(mismatch("V-static residual", 0.0, res));
            }
            if space.declared.f_nonnegative && fj.value < -1e-12 {
                return Err(mismatch("potential sign", 0.0, fj.value));
            }
        }
        if space.declared.conformally_flat {
            let w = max_abs(&conformal::weyl_from(&curv));
            if !(w <= LOAD_WEYL_TOL) {
                return Err(mismatch("Weyl tensor", 0.0, w));
            }
        }
    }
    if space.declared.bach_flat {
        for p in points.iter().skip(1) {
            let b = conformal::bach(&space.chart, p, cfg)?;
            let m = b.max_abs();
            if !(m <= LOAD_BACH_TOL) {
                return Err(mismatch("Bach tensor", 0.0, m));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in SpaceId::ALL {
            assert_eq!(id.as_str().parse::<SpaceId>().unwrap(), id);
        }
        assert!("torus".parse::<SpaceId>().is_err());
    }

    #[test]
    fn cylinder_domain_length() {
        let s = build(SpaceId::Cylinder, 3, &Params::default()).unwrap();
        assert!((s.chart.domain()[0].width() - PI / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn heavy_mass_rejected() {
        let err = build(SpaceId::Schwarzschild, 3, &Params::mass(0.25)).unwrap_err();
        assert!(matches!(err, GeometryError::InadmissibleMass { .. }));
    }

    #[test]
    fn foreign_parameter_rejected() {
        let err = build(SpaceId::Hemisphere, 3, &Params::mass(0.1)).unwrap_err();
        assert!(matches!(err, GeometryError::InvalidParameter(_)));
    }

    #[test]
    fn dimension_caps() {
        assert!(matches!(
            build_unverified(SpaceId::Hemisphere, 7, &Params::default()),
            Err(GeometryError::UnsupportedDimension { .. })
        ));
        assert!(build_unverified(SpaceId::ProductSpheres, 3, &Params::default()).is_err());
    }
}
