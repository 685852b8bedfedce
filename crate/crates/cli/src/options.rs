//! Flags shared by the verify, sweep and integrate commands, and the JSON
//! config file that mirrors them.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use curvlab::catalog::{Params, SpaceId};
use curvlab::checks::IntegralConfig;
use curvlab::quadrature;
use curvlab::{Backend, DiffConfig, GeometryError};

pub const DEFAULT_N: usize = 3;
pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_FIBER: usize = 8;
pub const DEFAULT_RANDOM_SEED: u64 = 42;

/// A usage or validation failure; maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<GeometryError> for UsageError {
    fn from(e: GeometryError) -> Self {
        UsageError(e.to_string())
    }
}

impl From<std::io::Error> for UsageError {
    fn from(e: std::io::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<csv::Error> for UsageError {
    fn from(e: csv::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<serde_json::Error> for UsageError {
    fn from(e: serde_json::Error) -> Self {
        UsageError(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, UsageError>;

/// Every flag is optional so that a config file can fill the gaps. Numeric
/// space parameters are kept as text because `sweep` accepts `a:b:steps`
/// ranges in their place.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Catalog space id (see `curvlab list`)
    #[arg(long)]
    pub space: Option<String>,
    /// Dimension
    #[arg(long)]
    pub n: Option<usize>,
    /// Schwarzschild mass
    #[arg(long)]
    #[serde(deserialize_with = "number_or_text")]
    pub m: Option<String>,
    /// Boundary radius of the Miao–Tam balls
    #[arg(long)]
    #[serde(deserialize_with = "number_or_text")]
    pub r0: Option<String>,
    /// Sphere radii of product_spheres, as `a,b`
    #[arg(long)]
    pub radii: Option<String>,
    /// Seed of perturbed_flat
    #[arg(long)]
    pub seed: Option<u64>,
    /// Perturbation amplitude of perturbed_flat
    #[arg(long)]
    #[serde(deserialize_with = "number_or_text")]
    pub amplitude: Option<String>,
    /// Comma-separated check ids (default: every applicable check)
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// Single check id for sweeps, or `roots`
    #[arg(long)]
    pub check: Option<String>,
    /// Radial integrand for `integrate`
    #[arg(long)]
    pub integrand: Option<String>,
    /// Points along the radial coordinate
    #[arg(long)]
    pub grid: Option<usize>,
    /// Points along each remaining coordinate
    #[arg(long)]
    pub fiber: Option<usize>,
    /// Extra seeded random points
    #[arg(long)]
    pub random_points: Option<usize>,
    /// Seed of the random points
    #[arg(long)]
    pub random_seed: Option<u64>,
    /// analytic or fd
    #[arg(long)]
    pub backend: Option<String>,
    /// Finite-difference step
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Gauss–Legendre order
    #[arg(long)]
    pub order: Option<usize>,
    /// Boundary margin of the radial integral
    #[arg(long)]
    pub delta: Option<f64>,
    /// Report file; the format follows the extension (.json or .csv)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file of default flag values
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Include runtime_ms in reports
    #[arg(long)]
    #[serde(deserialize_with = "flag")]
    pub timings: bool,
    /// Print JSON instead of text
    #[arg(long)]
    #[serde(deserialize_with = "flag")]
    pub json: bool,
}

fn flag<'de, D: serde::Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
    Ok(Option::<bool>::deserialize(d)?.unwrap_or(false))
}

/// Config values for sweepable parameters may be numbers or range strings.
fn number_or_text<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    match Option::<serde_json::Value>::deserialize(d)? {
        None => Ok(None),
        Some(serde_json::Value::Number(x)) => Ok(Some(x.to_string())),
        Some(serde_json::Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(serde::de::Error::custom(format!("expected a number or a string, got {other}"))),
    }
}

macro_rules! fill {
    ($cli:ident, $cfg:ident; $($field:ident),*) => {
        $( if $cli.$field.is_none() { $cli.$field = $cfg.$field; } )*
    };
}

impl Options {
    /// Fills unset flags from the config file, if one was given.
    pub fn resolve(mut self) -> CliResult<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let cfg = Self::load(&path)?;
        fill!(self, cfg; space, n, m, r0, radii, seed, amplitude, checks, check, integrand,
              grid, fiber, random_points, random_seed, backend, fd_step, order, delta, out, threads);
        self.timings |= cfg.timings;
        self.json |= cfg.json;
        Ok(self)
    }

    fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())))
    }

    /// Errors if any of the named flags was set; used for flags a command
    /// ignores.
    pub fn reject(&self, command: &str, names: &[&str]) -> CliResult<()> {
        for &name in names {
            let set = match name {
                "checks" => self.checks.is_some(),
                "check" => self.check.is_some(),
                "integrand" => self.integrand.is_some(),
                "grid" => self.grid.is_some(),
                "fiber" => self.fiber.is_some(),
                "random-points" => self.random_points.is_some(),
                "random-seed" => self.random_seed.is_some(),
                "order" => self.order.is_some(),
                "delta" => self.delta.is_some(),
                "out" => self.out.is_some(),
                "json" => self.json,
                _ => unreachable!("unknown flag {name}"),
            };
            if set {
                return Err(UsageError(format!("--{name} does not apply to {command}")));
            }
        }
        Ok(())
    }

    pub fn space_id(&self) -> CliResult<SpaceId> {
        let id = self
            .space
            .as_deref()
            .ok_or_else(|| UsageError("--space is required".into()))?;
        Ok(id.parse()?)
    }

    pub fn dim(&self) -> usize {
        self.n.unwrap_or(DEFAULT_N)
    }

    /// Space parameters; every numeric one must be a single value.
    pub fn params(&self) -> CliResult<Params> {
        Ok(Params {
            m: self.m.as_deref().map(|s| number("m", s)).transpose()?,
            r0: self.r0.as_deref().map(|s| number("r0", s)).transpose()?,
            radii: self.radii.as_deref().map(radii).transpose()?,
            seed: self.seed,
            amplitude: self.amplitude.as_deref().map(|s| number("amplitude", s)).transpose()?,
        })
    }

    pub fn backend(&self) -> CliResult<Backend> {
        match self.backend.as_deref() {
            None | Some("analytic") => Ok(Backend::Analytic),
            Some("fd") => Ok(Backend::FiniteDifference),
            Some(other) => Err(UsageError(format!("unknown backend '{other}' (expected analytic or fd)"))),
        }
    }

    pub fn diff_config(&self) -> CliResult<DiffConfig> {
        match self.fd_step {
            None => Ok(DiffConfig::default()),
            Some(h) if h > 0.0 && h.is_finite() => Ok(DiffConfig::with_step(h)),
            Some(h) => Err(UsageError(format!("--fd-step must be positive, got {h}"))),
        }
    }

    pub fn integral_config(&self) -> IntegralConfig {
        IntegralConfig {
            order: self.order.unwrap_or(quadrature::DEFAULT_ORDER),
            delta: self.delta.unwrap_or(quadrature::DEFAULT_DELTA),
        }
    }

    pub fn grid_counts(&self) -> CliResult<(usize, usize)> {
        let grid = self.grid.unwrap_or(DEFAULT_GRID);
        let fiber = self.fiber.unwrap_or(DEFAULT_FIBER);
        if grid == 0 || fiber == 0 {
            return Err(UsageError("--grid and --fiber must be positive".into()));
        }
        Ok((grid, fiber))
    }

    pub fn init_threads(&self) -> CliResult<()> {
        if let Some(t) = self.threads {
            if t == 0 {
                return Err(UsageError("--threads must be positive".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| UsageError(e.to_string()))?;
        }
        Ok(())
    }
}

fn number(name: &str, s: &str) -> CliResult<f64> {
    s.trim()
        .parse()
        .map_err(|_| UsageError(format!("--{name} expects a number, got '{s}'")))
}

fn radii(s: &str) -> CliResult<(f64, f64)> {
    match s.split(',').collect::<Vec<_>>().as_slice() {
        [a, b] => Ok((number("radii", a)?, number("radii", b)?)),
        _ => Err(UsageError(format!("--radii expects 'a,b', got '{s}'"))),
    }
}

/// `a:b:steps`, endpoints included.
pub fn parse_range(name: &str, s: &str) -> CliResult<Vec<f64>> {
    let bad = || UsageError(format!("--{name} range must be 'a:b:steps', got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, k] = parts.as_slice() else {
        return Err(bad());
    };
    let (a, b) = (number(name, a)?, number(name, b)?);
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    match k {
        0 => Err(bad()),
        1 if a == b => Ok(vec![a]),
        1 => Err(UsageError(format!("--{name} range with one step needs a == b"))),
        _ => Ok((0..k)
            .map(|i| {
                if i == k - 1 {
                    b
                } else {
                    a + (b - a) * i as f64 / (k - 1) as f64
                }
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_includes_endpoints() {
        let v = parse_range("m", "0.02:0.18:9").unwrap();
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], 0.02);
        assert_eq!(v[8], 0.18);
        assert!((v[4] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn malformed_ranges() {
        for s in ["0.1", "0.1:0.2", "0.1:0.2:0", "a:0.2:3", "0.1:0.2:1"] {
            assert!(parse_range("m", s).is_err(), "{s}");
        }
        assert_eq!(parse_range("m", "0.1:0.1:1").unwrap(), vec![0.1]);
    }

    #[test]
    fn config_fills_only_unset_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("suite.json");
        fs::write(&path, r#"{"space": "schwarzschild", "m": 0.1, "n": 4, "checks": ["vstatic"], "timings": true}"#)
            .unwrap();
        let cli = Options {
            n: Some(3),
            config: Some(path),
            ..Options::default()
        };
        let o = cli.resolve().unwrap();
        assert_eq!(o.space.as_deref(), Some("schwarzschild"));
        assert_eq!(o.n, Some(3));
        assert_eq!(o.checks, Some(vec!["vstatic".to_string()]));
        assert!(o.timings);
        assert_eq!(o.params().unwrap().m, Some(0.1));
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, r#"{"spcae": "hemisphere"}"#).unwrap();
        let cli = Options {
            config: Some(path),
            ..Options::default()
        };
        assert!(cli.resolve().is_err());
    }
}
