use std::fs;

use serde::Serialize;
use serde_json::json;
use serde_json::value::RawValue;

use curvlab::catalog::{
    self, mass_bound, schwarzschild_v, CatalogSpace, SpaceId, DEFAULT_AMPLITUDE, DEFAULT_BALL_RADIUS, DEFAULT_RADII,
    DEFAULT_SEED,
};
use curvlab::checks::{run_check, CheckId, CheckRun};
use curvlab::grid::SampleGrid;
use curvlab::quadrature::{integrate_radial, Integrand};

use crate::options::{parse_range, CliResult, Options, UsageError, DEFAULT_RANDOM_SEED};
use crate::report::{fixed, Format, ResidualReport};

/// Failing points echoed to stderr per check.
const MAX_LISTED_FAILURES: usize = 20;
/// Largest `|V(r_i)|` accepted at a reported horizon.
const ROOT_TOLERANCE: f64 = 1e-12;

fn real(x: f64) -> String {
    fixed(x).unwrap_or_else(|| x.to_string())
}

fn space_line(id: SpaceId) -> String {
    let dims = id.dimensions();
    let n = if dims.start() == dims.end() {
        format!("n = {}", dims.start())
    } else {
        format!("n = {}..{}", dims.start(), dims.end())
    };
    let detail = match id {
        SpaceId::Schwarzschild => dims
            .clone()
            .map(|n| format!("m ∈ (0, {}) for n={n}", truncated(mass_bound(n))))
            .collect::<Vec<_>>()
            .join(", "),
        SpaceId::EuclideanBall => format!("r0 > 0 (default {DEFAULT_BALL_RADIUS}); {n}"),
        SpaceId::SphericalBall => format!("r0 ∈ (0, π/2) (default {DEFAULT_BALL_RADIUS}); {n}"),
        SpaceId::ProductSpheres => format!("radii a,b > 0 (default {},{}); {n}", DEFAULT_RADII.0, DEFAULT_RADII.1),
        SpaceId::PerturbedFlat => {
            format!("seed (default {DEFAULT_SEED}), amplitude ∈ [0, 0.5/n] (default {DEFAULT_AMPLITUDE}); {n}")
        }
        _ => n,
    };
    format!("{id}  {detail}")
}

/// Five decimals, with an ellipsis when digits were dropped.
fn truncated(x: f64) -> String {
    let t = (x * 1e5).floor() / 1e5;
    if (x - t).abs() > 1e-15 {
        format!("{t:.5}…")
    } else {
        format!("{t:.5}")
    }
}

pub fn list(as_json: bool) -> CliResult<()> {
    if as_json {
        let mut items = Vec::new();
        for id in SpaceId::ALL {
            let dims = id.dimensions();
            let mut item = json!({
                "kind": "space",
                "id": id.as_str(),
                "n_min": dims.start(),
                "n_max": dims.end(),
                "vstatic": id.is_vstatic(),
                "params": space_line(id).split_once("  ").map(|(_, d)| d.to_string()),
            });
            if id == SpaceId::Schwarzschild {
                item["mass_bounds"] = dims.map(|n| json!({"n": n, "bound": mass_bound(n)})).collect();
            }
            items.push(item);
        }
        for c in CheckId::ALL {
            items.push(json!({
                "kind": "check",
                "id": c.as_str(),
                "description": c.description(),
                "tolerance": c.tolerance(),
                "abs_floor": c.abs_floor(),
            }));
        }
        items.push(json!({
            "kind": "check",
            "id": "roots",
            "description": "horizons r1 < r2 of the Schwarzschild band (sweep only)",
            "tolerance": ROOT_TOLERANCE,
            "abs_floor": ROOT_TOLERANCE,
        }));
        for i in Integrand::ALL {
            items.push(json!({"kind": "integrand", "id": i.as_str()}));
        }
        println!("{}", serde_json::to_string_pretty(&items)?);
        return Ok(());
    }
    println!("spaces:");
    for id in SpaceId::ALL {
        println!("  {}", space_line(id));
    }
    println!("checks:");
    let width = CheckId::ALL.iter().map(|c| c.as_str().len()).max().unwrap_or(0);
    for c in CheckId::ALL {
        println!("  {:<width$}  {}", c.as_str(), c.description());
    }
    println!("  {:<width$}  horizons r1 < r2 of the Schwarzschild band (sweep only)", "roots");
    println!("integrands:");
    for i in Integrand::ALL {
        println!("  {i}");
    }
    Ok(())
}

fn build_space(o: &Options) -> CliResult<CatalogSpace> {
    let space = catalog::build(o.space_id()?, o.dim(), &o.params()?)?;
    Ok(space.with_backend(o.backend()?))
}

fn sample_grid(o: &Options, space: &CatalogSpace) -> CliResult<SampleGrid> {
    let (radial, fiber) = o.grid_counts()?;
    let grid = SampleGrid::radial(&space.chart, radial, fiber);
    Ok(match o.random_points {
        Some(k) if k > 0 => grid.with_random(&space.chart, k, o.random_seed.unwrap_or(DEFAULT_RANDOM_SEED)),
        _ => grid,
    })
}

fn parse_check(s: &str, space: &CatalogSpace) -> CliResult<CheckId> {
    let c: CheckId = s.trim().parse()?;
    c.applicable(space)?;
    Ok(c)
}

fn emit(o: &Options, reports: &[ResidualReport], default: Format) -> CliResult<()> {
    match &o.out {
        Some(path) => {
            let text = Format::from_path(path)?.render(reports)?;
            fs::write(path, text).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?;
        }
        None => print!("{}", default.render(reports)?),
    }
    Ok(())
}

fn summarize(space: &CatalogSpace, run: &CheckRun) {
    let verdict = if run.pass() { "PASS" } else { "FAIL" };
    eprintln!(
        "{verdict} {} n={} {}: points={} errors={} max_abs={} max_rel={}",
        space.id,
        space.n,
        run.check,
        run.points.len(),
        run.errors(),
        real(run.max_abs()),
        real(run.max_rel()),
    );
    if run.pass() {
        return;
    }
    let failing: Vec<_> = run.failing_points().collect();
    for p in failing.iter().take(MAX_LISTED_FAILURES) {
        let x = p.point.iter().map(|&v| real(v)).collect::<Vec<_>>().join(", ");
        match &p.outcome {
            Ok(o) => eprintln!(
                "  {} #{} x=({x}) abs={} rel={}",
                run.check,
                p.index,
                real(o.abs),
                real(o.rel)
            ),
            Err(e) => eprintln!("  {} #{} x=({x}) error: {e}", run.check, p.index),
        }
    }
    if failing.len() > MAX_LISTED_FAILURES {
        eprintln!("  ... and {} more", failing.len() - MAX_LISTED_FAILURES);
    }
}

pub fn verify(o: &Options) -> CliResult<bool> {
    o.reject("verify", &["check", "integrand", "json"])?;
    let space = build_space(o)?;
    let mut checks = match &o.checks {
        Some(ids) if ids.iter().any(|s| s.trim() == "all") => CheckId::applicable_to(&space),
        Some(ids) => ids.iter().map(|s| parse_check(s, &space)).collect::<CliResult<Vec<_>>>()?,
        None => CheckId::applicable_to(&space),
    };
    checks.sort();
    checks.dedup();
    let cfg = o.diff_config()?;
    let integral = o.integral_config();
    let grid = sample_grid(o, &space)?;
    let mut reports = Vec::new();
    let mut all_pass = true;
    for check in checks {
        let run = run_check(&space, check, &grid, &cfg, &integral)?;
        summarize(&space, &run);
        all_pass &= run.pass();
        reports.push(ResidualReport::from_run(&space, &run, o.timings));
    }
    emit(o, &reports, Format::Json)?;
    Ok(all_pass)
}

pub fn sweep(o: &Options) -> CliResult<bool> {
    o.reject("sweep", &["checks", "integrand", "json"])?;
    let check = o
        .check
        .clone()
        .ok_or_else(|| UsageError("--check is required (a check id or 'roots')".into()))?;
    let ranged: Vec<(&str, &String)> = [("m", &o.m), ("r0", &o.r0), ("amplitude", &o.amplitude)]
        .into_iter()
        .filter_map(|(name, v)| v.as_ref().filter(|s| s.contains(':')).map(|s| (name, s)))
        .collect();
    let [(name, range)] = ranged.as_slice() else {
        return Err(UsageError(
            "sweep needs exactly one parameter given as a range a:b:steps (--m, --r0 or --amplitude)".into(),
        ));
    };
    let values = parse_range(name, range)?;
    // build every space first so that an inadmissible value fails before any work
    let spaces = values
        .iter()
        .map(|v| {
            let mut one = o.clone();
            let text = Some(v.to_string());
            match *name {
                "m" => one.m = text,
                "r0" => one.r0 = text,
                _ => one.amplitude = text,
            }
            build_space(&one)
        })
        .collect::<CliResult<Vec<_>>>()?;

    let reports = if check == "roots" {
        if *name != "m" || spaces[0].id != SpaceId::Schwarzschild {
            return Err(UsageError("--check roots needs a schwarzschild mass sweep".into()));
        }
        root_rows(&spaces, &values)
    } else {
        let check = parse_check(&check, &spaces[0])?;
        let cfg = o.diff_config()?;
        let integral = o.integral_config();
        let mut rows = Vec::new();
        for space in &spaces {
            let grid = sample_grid(o, space)?;
            let run = run_check(space, check, &grid, &cfg, &integral)?;
            summarize(space, &run);
            let mut r = ResidualReport::from_run(space, &run, o.timings);
            r.roots = space.roots;
            rows.push(r);
        }
        rows
    };
    emit(o, &reports, Format::Csv)?;
    Ok(reports.iter().all(|r| r.pass))
}

/// One row per mass: the horizon residual `max |V(r_i)|`, and whether the
/// roots moved the right way since the previous mass (r1 up, r2 down as m
/// grows).
fn root_rows(spaces: &[CatalogSpace], masses: &[f64]) -> Vec<ResidualReport> {
    let mut rows: Vec<ResidualReport> = Vec::new();
    let mut prev: Option<(f64, (f64, f64))> = None;
    for (space, &m) in spaces.iter().zip(masses) {
        let (r1, r2) = space.roots.expect("schwarzschild spaces carry their roots");
        let v = [r1, r2].map(|r| schwarzschild_v(space.n, m, r)[0]);
        let max_abs = v[0].abs().max(v[1].abs());
        let monotone = match prev {
            Some((pm, (p1, p2))) if m > pm => r1 > p1 && r2 < p2,
            Some((pm, (p1, p2))) if m < pm => r1 < p1 && r2 > p2,
            Some((_, p)) => p == (r1, r2),
            None => true,
        };
        let pass = r1 < r2 && max_abs <= ROOT_TOLERANCE && monotone;
        if !pass {
            eprintln!(
                "FAIL roots m={}: r1={} r2={} max|V|={} monotone={monotone}",
                real(m),
                real(r1),
                real(r2),
                real(max_abs)
            );
        }
        rows.push(ResidualReport {
            space: space.id.to_string(),
            n: space.n,
            params: space.params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            check: "roots".into(),
            grid: "bisection".into(),
            points: 2,
            errors: 0,
            max_abs,
            mean_abs: 0.5 * (v[0].abs() + v[1].abs()),
            max_rel: max_abs,
            min_value: v[0].min(v[1]),
            max_value: v[0].max(v[1]),
            tolerance: ROOT_TOLERANCE,
            abs_floor: ROOT_TOLERANCE,
            pass,
            runtime_ms: None,
            roots: Some((r1, r2)),
        });
        prev = Some((m, (r1, r2)));
    }
    rows
}

#[derive(Serialize)]
struct IntegralOut {
    space: &'static str,
    n: usize,
    params: Vec<String>,
    integrand: &'static str,
    order: usize,
    delta: Option<Box<RawValue>>,
    coarse: Option<Box<RawValue>>,
    fine: Option<Box<RawValue>>,
    value: Option<Box<RawValue>>,
    abs_integral: Option<Box<RawValue>>,
    relative: Option<Box<RawValue>>,
    pass: Option<bool>,
}

pub fn integrate(o: &Options) -> CliResult<bool> {
    o.reject(
        "integrate",
        &["checks", "check", "grid", "fiber", "random-points", "random-seed", "out"],
    )?;
    let space = build_space(o)?;
    let integrand: Integrand = match &o.integrand {
        Some(s) => s.parse()?,
        None => Integrand::DivFGradRicnorm,
    };
    let q = o.integral_config();
    let r = integrate_radial(&space, integrand, q.order, q.delta, &o.diff_config()?)?;
    // only the divergence integrand has a known value
    let pass = (integrand == Integrand::DivFGradRicnorm).then(|| {
        let c = CheckId::Integral;
        r.value.abs() <= c.tolerance() * r.abs_value || r.value.abs() <= c.abs_floor()
    });
    let params: Vec<String> = space.params.iter().map(|(k, v)| format!("{k}={}", real(*v))).collect();
    if o.json {
        let raw = |x: f64| fixed(x).map(|t| RawValue::from_string(t).expect("fixed reals are valid JSON"));
        let out = IntegralOut {
            space: space.id.as_str(),
            n: space.n,
            params,
            integrand: integrand.as_str(),
            order: r.order,
            delta: raw(r.delta),
            coarse: raw(r.coarse),
            fine: raw(r.fine),
            value: raw(r.value),
            abs_integral: raw(r.abs_value),
            relative: raw(r.relative()),
            pass,
        };
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        println!("space         {} n={} {}", space.id, space.n, params.join(" "));
        println!("integrand     {integrand}");
        println!("order         {}", r.order);
        println!("delta         {}", real(r.delta));
        println!("coarse        {}", real(r.coarse));
        println!("fine          {}", real(r.fine));
        println!("value         {}", real(r.value));
        println!("abs_integral  {}", real(r.abs_value));
        println!("relative      {}", real(r.relative()));
        println!("pass          {}", pass.map_or("-".to_string(), |p| p.to_string()));
    }
    Ok(pass.unwrap_or(true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_bound_text() {
        assert!(space_line(SpaceId::Schwarzschild).starts_with("schwarzschild  m ∈ (0, 0.19245…) for n=3"));
        assert_eq!(truncated(0.125), "0.12500");
    }
}
