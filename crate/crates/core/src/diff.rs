//! Differentiation backend: central finite differences with one level of
//! Richardson extrapolation, plus analytic scalar fields.
//!
//! Every stencil here is a central O(h²) formula whose error expands in even
//! powers of `h`, so combining steps `h` and `h/2` as `(4 D(h/2) - D(h)) / 3`
//! leaves an O(h⁴) remainder.

use std::fmt;
use std::sync::Arc;

use crate::chart::Interval;
use crate::error::{GeometryError, Result};

/// Step size and extrapolation switch for every finite-difference stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffConfig {
    pub step: f64,
    pub richardson: bool,
}

pub const DEFAULT_FD_STEP: f64 = 1e-3;

impl Default for DiffConfig {
    fn default() -> Self {
        Self {
            step: DEFAULT_FD_STEP,
            richardson: true,
        }
    }
}

impl DiffConfig {
    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }
}

fn check_stencil(x: &[f64], coord: usize, reach: f64, domain: &[Interval]) -> Result<()> {
    let iv = domain[coord];
    if x[coord] - reach < iv.lo || x[coord] + reach > iv.hi {
        return Err(GeometryError::StencilOutOfDomain {
            coord,
            point: x.to_vec(),
        });
    }
    Ok(())
}

#[inline]
fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(a, d) in moves {
        y[a] += d;
    }
    y
}

#[inline]
fn combine(fine: &[f64], coarse: &[f64]) -> Vec<f64> {
    fine.iter()
        .zip(coarse)
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect()
}

/// First partials `d1[a][c] = ∂_a F_c` of a vector-valued field.
pub fn jet1<F>(mut field: F, x: &[f64], domain: &[Interval], cfg: &DiffConfig) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let h = cfg.step;
    let mut d1 = Vec::with_capacity(n);
    for a in 0..n {
        check_stencil(x, a, h, domain)?;
        let mut central = |s: f64| -> Result<Vec<f64>> {
            let p = field(&shifted(x, &[(a, s)]))?;
            let m = field(&shifted(x, &[(a, -s)]))?;
            Ok(p.iter().zip(&m).map(|(p, m)| (p - m) / (2.0 * s)).collect())
        };
        let coarse = central(h)?;
        d1.push(if cfg.richardson {
            combine(&central(0.5 * h)?, &coarse)
        } else {
            coarse
        });
    }
    Ok(d1)
}

/// Value, first and second partials of a vector-valued field.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub value: Vec<f64>,
    /// `d1[a][c] = ∂_a F_c`
    pub d1: Vec<Vec<f64>>,
    /// `d2[a*n + b][c] = ∂_a ∂_b F_c`, symmetric in `(a, b)`.
    pub d2: Vec<Vec<f64>>,
}

/// Value, gradient and Hessian of a vector-valued field from one shared stencil.
pub fn jet2<F>(mut field: F, x: &[f64], domain: &[Interval], cfg: &DiffConfig) -> Result<Jet2>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let h = cfg.step;
    for a in 0..n {
        check_stencil(x, a, h, domain)?;
    }
    let value = field(x)?;
    let m = value.len();
    let mut d1 = vec![Vec::new(); n];
    let mut d2 = vec![Vec::new(); n * n];

    let steps: &[f64] = if cfg.richardson { &[1.0, 0.5] } else { &[1.0] };

    for a in 0..n {
        let mut firsts = Vec::new();
        let mut seconds = Vec::new();
        for &frac in steps {
            let s = frac * h;
            let p = field(&shifted(x, &[(a, s)]))?;
            let q = field(&shifted(x, &[(a, -s)]))?;
            firsts.push((0..m).map(|c| (p[c] - q[c]) / (2.0 * s)).collect::<Vec<_>>());
            seconds.push(
                (0..m)
                    .map(|c| (p[c] - 2.0 * value[c] + q[c]) / (s * s))
                    .collect::<Vec<_>>(),
            );
        }
        if cfg.richardson {
            d1[a] = combine(&firsts[1], &firsts[0]);
            d2[a * n + a] = combine(&seconds[1], &seconds[0]);
        } else {
            d1[a] = firsts.pop().unwrap();
            d2[a * n + a] = seconds.pop().unwrap();
        }
    }

    for a in 0..n {
        for b in (a + 1)..n {
            let mut mixed = Vec::new();
            for &frac in steps {
                let s = frac * h;
                let pp = field(&shifted(x, &[(a, s), (b, s)]))?;
                let pm = field(&shifted(x, &[(a, s), (b, -s)]))?;
                let mp = field(&shifted(x, &[(a, -s), (b, s)]))?;
                let mm = field(&shifted(x, &[(a, -s), (b, -s)]))?;
                mixed.push(
                    (0..m)
                        .map(|c| (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * s * s))
                        .collect::<Vec<_>>(),
                );
            }
            let v = if cfg.richardson {
                combine(&mixed[1], &mixed[0])
            } else {
                mixed.pop().unwrap()
            };
            d2[b * n + a] = v.clone();
            d2[a * n + b] = v;
        }
    }
    Ok(Jet2 { value, d1, d2 })
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A scalar field with optional analytic gradient and Hessian (coordinate
/// partials, not covariant derivatives).
#[derive(Clone)]
pub struct ScalarField {
    value: ValueFn,
    gradient: Option<VectorFn>,
    hessian: Option<VectorFn>,
    use_analytic: bool,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.gradient.is_some())
            .field("analytic_hessian", &self.hessian.is_some())
            .field("use_analytic", &self.use_analytic)
            .finish()
    }
}

impl ScalarField {
    pub fn new(value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            gradient: None,
            hessian: None,
            use_analytic: true,
        }
    }

    /// Registers analytic first and second partials; the Hessian is row-major `n×n`.
    pub fn with_partials(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        hessian: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self.hessian = Some(Arc::new(hessian));
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c)
    }

    /// Disables registered partials so every derivative is differenced.
    pub fn finite_difference_only(mut self) -> Self {
        self.use_analytic = false;
        self
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.use_analytic && self.gradient.is_some()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    /// Value, gradient and Hessian of the field at `x`.
    pub fn jet(&self, x: &[f64], domain: &[Interval], cfg: &DiffConfig) -> Result<ScalarJet> {
        let n = x.len();
        if self.use_analytic {
            if let (Some(gr), Some(he)) = (&self.gradient, &self.hessian) {
                return Ok(ScalarJet {
                    value: self.value(x),
                    gradient: gr(x),
                    hessian: he(x),
                });
            }
        }
        let jet = jet2(|y| Ok(vec![self.value(y)]), x, domain, cfg)?;
        Ok(ScalarJet {
            value: jet.value[0],
            gradient: jet.d1.iter().map(|v| v[0]).collect(),
            hessian: (0..n * n).map(|ab| jet.d2[ab][0]).collect(),
        })
    }

    /// Value and gradient only.
    pub fn gradient(&self, x: &[f64], domain: &[Interval], cfg: &DiffConfig) -> Result<(f64, Vec<f64>)> {
        if self.use_analytic {
            if let Some(gr) = &self.gradient {
                return Ok((self.value(x), gr(x)));
            }
        }
        let d1 = jet1(|y| Ok(vec![self.value(y)]), x, domain, cfg)?;
        Ok((self.value(x), d1.iter().map(|v| v[0]).collect()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<f64>,
}

/// 1-D central-difference weights for an m-th derivative, as `(offset, weight)`
/// with offsets in units of `h`; all are second-order accurate.
fn central_weights(m: usize) -> &'static [(i32, f64)] {
    match m {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("orders above 4 are rejected earlier"),
    }
}

/// Partial derivative of `field` along `multi_index` (coordinate indices,
/// repeats allowed, total order ≤ 4).
///
/// Orders 1 and 2 use the field's registered analytic partials when present.
/// Otherwise a tensor-product central stencil is evaluated at steps `h` and
/// `h/2` and Richardson-combined.
pub fn partial(
    field: &ScalarField,
    point: &[f64],
    multi_index: &[usize],
    domain: &[Interval],
    cfg: &DiffConfig,
) -> Result<f64> {
    let order = multi_index.len();
    if order > 4 {
        return Err(GeometryError::DerivativeOrder(order));
    }
    if order == 0 {
        return Ok(field.value(point));
    }
    if field.use_analytic {
        let n = point.len();
        match (order, &field.gradient, &field.hessian) {
            (1, Some(gr), _) => return Ok(gr(point)[multi_index[0]]),
            (2, _, Some(he)) => return Ok(he(point)[multi_index[0] * n + multi_index[1]]),
            _ => {}
        }
    }

    let mut mult = vec![0usize; point.len()];
    for &a in multi_index {
        mult[a] += 1;
    }
    for (a, &m) in mult.iter().enumerate() {
        if m > 0 {
            let reach = if m <= 2 { 1.0 } else { 2.0 };
            check_stencil(point, a, reach * cfg.step, domain)?;
        }
    }
    let active: Vec<(usize, usize)> = mult
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(a, &m)| (a, m))
        .collect();

    let eval = |h: f64| -> f64 {
        let mut total = 0.0;
        let mut stack: Vec<(Vec<f64>, f64)> = vec![(point.to_vec(), 1.0)];
        for &(a, m) in &active {
            let mut next = Vec::new();
            for (y, w) in &stack {
                for &(off, wt) in central_weights(m) {
                    let mut z = y.clone();
                    z[a] += off as f64 * h;
                    next.push((z, w * wt / h.powi(m as i32)));
                }
            }
            stack = next;
        }
        for (y, w) in stack {
            total += w * field.value(&y);
        }
        total
    };
    let coarse = eval(cfg.step);
    if cfg.richardson {
        Ok((4.0 * eval(0.5 * cfg.step) - coarse) / 3.0)
    } else {
        Ok(coarse)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> Vec<Interval> {
        vec![Interval::new(-10.0, 10.0)]
    }

    #[test]
    fn square_first_derivative() {
        let f = ScalarField::new(|x| x[0] * x[0]);
        let d = partial(&f, &[3.0], &[0], &line(), &DiffConfig::default()).unwrap();
        assert!((d - 6.0).abs() < 1e-9);
    }

    #[test]
    fn cylinder_potential_second_derivative() {
        let k = 3f64.sqrt();
        let f = ScalarField::new(move |x| (k * x[0]).sin());
        let d = partial(&f, &[0.5], &[0, 0], &line(), &DiffConfig::default()).unwrap();
        assert!((d + 3.0 * (k * 0.5).sin()).abs() < 1e-7);
    }

    #[test]
    fn constant_field_has_no_derivatives() {
        let f = ScalarField::constant(2.5);
        let dom = vec![Interval::new(-1.0, 1.0); 2];
        for mi in [&[0][..], &[0, 1], &[1, 1, 0], &[0, 0, 1, 1]] {
            let d = partial(&f, &[0.1, 0.2], mi, &dom, &DiffConfig::default()).unwrap();
            assert!(d.abs() < 1e-10, "{mi:?}: {d}");
        }
    }

    #[test]
    fn fourth_order_mixed_partial() {
        // ∂x² ∂y² (x³ y³) = 36 x y
        let f = ScalarField::new(|x| x[0].powi(3) * x[1].powi(3));
        let dom = vec![Interval::new(-2.0, 2.0); 2];
        let cfg = DiffConfig::with_step(1e-2);
        let d = partial(&f, &[0.5, 0.7], &[0, 0, 1, 1], &dom, &cfg).unwrap();
        assert!((d - 36.0 * 0.35).abs() < 1e-6, "{d}");
    }

    #[test]
    fn stencil_outside_domain_is_an_error() {
        let f = ScalarField::new(|x| x[0]);
        let dom = vec![Interval::new(0.0, 1.0)];
        let err = partial(&f, &[0.0005], &[0], &dom, &DiffConfig::default()).unwrap_err();
        assert!(matches!(err, GeometryError::StencilOutOfDomain { coord: 0, .. }));
    }

    #[test]
    fn order_five_rejected() {
        let f = ScalarField::new(|x| x[0]);
        let err = partial(&f, &[0.0], &[0; 5], &line(), &DiffConfig::default()).unwrap_err();
        assert_eq!(err, GeometryError::DerivativeOrder(5));
    }

    #[test]
    fn richardson_improves_order() {
        let f = |x: &[f64]| Ok(vec![x[0].exp()]);
        let dom = line();
        let plain = DiffConfig {
            step: 0.1,
            richardson: false,
        };
        let rich = DiffConfig::with_step(0.1);
        let e_plain = (jet1(f, &[0.3], &dom, &plain).unwrap()[0][0] - 0.3f64.exp()).abs();
        let e_rich = (jet1(f, &[0.3], &dom, &rich).unwrap()[0][0] - 0.3f64.exp()).abs();
        assert!(e_rich < e_plain * 1e-2, "{e_plain} vs {e_rich}");
    }

    #[test]
    fn jet2_mixed_partials_symmetric() {
        let f = |x: &[f64]| Ok(vec![(x[0] * x[1]).sin() + x[2] * x[0] * x[0]]);
        let dom = vec![Interval::new(-1.0, 1.0); 3];
        let x = [0.2, 0.4, -0.3];
        let j = jet2(f, &x, &dom, &DiffConfig::default()).unwrap();
        let exact_01 = (x[0] * x[1]).cos() - x[0] * x[1] * (x[0] * x[1]).sin();
        assert!((j.d2[1][0] - exact_01).abs() < 1e-9);
        assert_eq!(j.d2[1][0], j.d2[3][0]);
        assert!((j.d2[2][0] - 2.0 * x[0]).abs() < 1e-9);
    }
}
