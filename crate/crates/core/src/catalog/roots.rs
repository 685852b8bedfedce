//! Horizons of the Schwarzschild band: the positive zeros of
//! `V(t) = 1 − 2m t^{2−n} − t²`.

use super::warped::schwarzschild_v;
use crate::error::{GeometryError, Result};

/// Exclusive upper bound `√((n−2)^{n−2}/nⁿ)` on the mass.
pub fn mass_bound(n: usize) -> f64 {
    let nf = n as f64;
    ((nf - 2.0).powf(nf - 2.0) / nf.powf(nf)).sqrt()
}

pub fn check_mass(n: usize, m: f64) -> Result<()> {
    let bound = mass_bound(n);
    if !(m > 0.0 && m < bound) {
        return Err(GeometryError::InadmissibleMass { n, m, bound });
    }
    Ok(())
}

/// Where `V` peaks: `t* = (m(n−2))^{1/n}`.
pub fn peak(n: usize, m: f64) -> f64 {
    (m * (n as f64 - 2.0)).powf(1.0 / n as f64)
}

const SCAN_POINTS: usize = 4096;

/// `(r1, r2)` with `r1 < r2`, bracketed by a sign scan of `V` on `(0, 1]`
/// (with the peak added to the scan) and refined by bisection to the last
/// representable bit.
pub fn schwarzschild_roots(n: usize, m: f64) -> Result<(f64, f64)> {
    check_mass(n, m)?;
    let v = |t: f64| schwarzschild_v(n, m, t)[0];
    let mut nodes: Vec<f64> = (1..=SCAN_POINTS).map(|k| k as f64 / SCAN_POINTS as f64).collect();
    nodes.push(peak(n, m));
    nodes.sort_by(f64::total_cmp);
    let mut brackets = Vec::new();
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (v(a) < 0.0) != (v(b) < 0.0) {
            brackets.push((a, b));
        }
    }
    match brackets.as_slice() {
        [first, second] => Ok((bisect(v, *first), bisect(v, *second))),
        _ => Err(GeometryError::InadmissibleMass {
            n,
            m,
            bound: mass_bound(n),
        }),
    }
}

fn bisect(v: impl Fn(f64) -> f64, (mut a, mut b): (f64, f64)) -> f64 {
    let neg_a = v(a) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (v(mid) < 0.0) == neg_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    if v(a).abs() <= v(b).abs() {
        a
    } else {
        b
    }
}
