//! Residual reports and their JSON/CSV encodings.
//!
//! Reals are written as `{:.16e}` (17 significant digits) so that identical
//! runs produce identical bytes; non-finite values become JSON `null` and
//! empty CSV fields. Columns, in order:
//!
//! `space, n, params, check, grid, points, errors, max_abs, mean_abs,
//! max_rel, min_value, max_value, tolerance, abs_floor, pass`
//!
//! followed by `runtime_ms` when timings are requested and by `r1, r2` on
//! Schwarzschild sweeps. In CSV, `params` is `name=value` pairs joined by
//! `;`.

use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use curvlab::catalog::CatalogSpace;
use curvlab::checks::CheckRun;

use crate::options::{CliResult, UsageError};

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub space: String,
    pub n: usize,
    pub params: Vec<(String, f64)>,
    pub check: String,
    pub grid: String,
    pub points: usize,
    pub errors: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub max_rel: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub tolerance: f64,
    pub abs_floor: f64,
    pub pass: bool,
    pub runtime_ms: Option<u64>,
    pub roots: Option<(f64, f64)>,
}

impl ResidualReport {
    pub fn from_run(space: &CatalogSpace, run: &CheckRun, timings: bool) -> Self {
        Self {
            space: space.id.to_string(),
            n: space.n,
            params: space.params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            check: run.check.to_string(),
            grid: run.grid.clone(),
            points: run.points.len(),
            errors: run.errors(),
            max_abs: run.max_abs(),
            mean_abs: run.mean_abs(),
            max_rel: run.max_rel(),
            min_value: run.min_value(),
            max_value: run.max_value(),
            tolerance: run.check.tolerance(),
            abs_floor: run.check.abs_floor(),
            pass: run.pass(),
            runtime_ms: timings.then_some(run.runtime_ms),
            roots: None,
        }
    }

    /// The pass rule applied to the stored statistics.
    #[cfg(test)]
    pub fn consistent(&self) -> bool {
        let rule = self.errors == 0
            && self.points > self.errors
            && (self.max_rel <= self.tolerance || self.max_abs <= self.abs_floor);
        rule == self.pass
    }
}

/// `{:.16e}`, or `None` for non-finite values.
pub fn fixed(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match fixed(self.0) {
            Some(text) => RawValue::from_string(text)
                .map_err(serde::ser::Error::custom)?
                .serialize(s),
            None => s.serialize_none(),
        }
    }
}

struct ParamMap<'a>(&'a [(String, f64)]);

impl Serialize for ParamMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, &Real(*v))?;
        }
        map.end()
    }
}

impl Serialize for ResidualReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("space", &self.space)?;
        map.serialize_entry("n", &self.n)?;
        map.serialize_entry("params", &ParamMap(&self.params))?;
        map.serialize_entry("check", &self.check)?;
        map.serialize_entry("grid", &self.grid)?;
        map.serialize_entry("points", &self.points)?;
        map.serialize_entry("errors", &self.errors)?;
        map.serialize_entry("max_abs", &Real(self.max_abs))?;
        map.serialize_entry("mean_abs", &Real(self.mean_abs))?;
        map.serialize_entry("max_rel", &Real(self.max_rel))?;
        map.serialize_entry("min_value", &Real(self.min_value))?;
        map.serialize_entry("max_value", &Real(self.max_value))?;
        map.serialize_entry("tolerance", &Real(self.tolerance))?;
        map.serialize_entry("abs_floor", &Real(self.abs_floor))?;
        map.serialize_entry("pass", &self.pass)?;
        if let Some(ms) = self.runtime_ms {
            map.serialize_entry("runtime_ms", &ms)?;
        }
        if let Some((r1, r2)) = self.roots {
            map.serialize_entry("r1", &Real(r1))?;
            map.serialize_entry("r2", &Real(r2))?;
        }
        map.end()
    }
}

pub fn to_json(reports: &[ResidualReport]) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(reports)?;
    s.push('\n');
    Ok(s)
}

const COLUMNS: [&str; 15] = [
    "space",
    "n",
    "params",
    "check",
    "grid",
    "points",
    "errors",
    "max_abs",
    "mean_abs",
    "max_rel",
    "min_value",
    "max_value",
    "tolerance",
    "abs_floor",
    "pass",
];

/// One header row; the optional columns appear when any report has them.
pub fn write_csv<W: Write>(reports: &[ResidualReport], w: W) -> CliResult<()> {
    let timings = reports.iter().any(|r| r.runtime_ms.is_some());
    let roots = reports.iter().any(|r| r.roots.is_some());
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if timings {
        header.push("runtime_ms");
    }
    if roots {
        header.extend(["r1", "r2"]);
    }
    out.write_record(&header)?;
    let real = |x: f64| fixed(x).unwrap_or_default();
    for r in reports {
        let params = r
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", real(*v)))
            .collect::<Vec<_>>()
            .join(";");
        let mut row = vec![
            r.space.clone(),
            r.n.to_string(),
            params,
            r.check.clone(),
            r.grid.clone(),
            r.points.to_string(),
            r.errors.to_string(),
            real(r.max_abs),
            real(r.mean_abs),
            real(r.max_rel),
            real(r.min_value),
            real(r.max_value),
            real(r.tolerance),
            real(r.abs_floor),
            r.pass.to_string(),
        ];
        if timings {
            row.push(r.runtime_ms.map(|m| m.to_string()).unwrap_or_default());
        }
        if roots {
            let (r1, r2) = r.roots.map_or((String::new(), String::new()), |(a, b)| (real(a), real(b)));
            row.extend([r1, r2]);
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv(reports: &[ResidualReport]) -> CliResult<String> {
    let mut buf = Vec::new();
    write_csv(reports, &mut buf)?;
    String::from_utf8(buf).map_err(|e| UsageError(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Ok(Format::Json),
            Some("csv") => Ok(Format::Csv),
            _ => Err(UsageError(format!(
                "cannot tell the report format of {}; use a .json or .csv extension",
                path.display()
            ))),
        }
    }

    pub fn render(&self, reports: &[ResidualReport]) -> CliResult<String> {
        match self {
            Format::Json => to_json(reports),
            Format::Csv => to_csv(reports),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResidualReport {
        ResidualReport {
            space: "schwarzschild".into(),
            n: 3,
            params: vec![("m".into(), 0.1)],
            check: "vstatic".into(),
            grid: "4x2x2".into(),
            points: 16,
            errors: 0,
            max_abs: 3.5e-9,
            mean_abs: 1e-9,
            max_rel: 2e-9,
            min_value: 0.0,
            max_value: 3.5e-9,
            tolerance: 1e-6,
            abs_floor: 1e-6,
            pass: true,
            runtime_ms: None,
            roots: None,
        }
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fixed(0.1).unwrap(), "1.0000000000000001e-1");
        assert_eq!(fixed(-2.5).unwrap(), "-2.5000000000000000e0");
        assert_eq!(fixed(f64::NAN), None);
        for x in [0.1, 1.0 / 3.0, 6.02e23, -1e-300] {
            assert_eq!(fixed(x).unwrap().parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_keys_in_documented_order() {
        let json = to_json(&[sample()]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v[0]["params"]["m"], 0.1);
        let keys: Vec<usize> = COLUMNS.iter().map(|k| json.find(&format!("\"{k}\"")).unwrap()).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(!json.contains("runtime_ms"));
    }

    #[test]
    fn non_finite_becomes_null() {
        let mut r = sample();
        r.mean_abs = f64::NAN;
        r.min_value = f64::INFINITY;
        let v: serde_json::Value = serde_json::from_str(&to_json(&[r]).unwrap()).unwrap();
        assert!(v[0]["mean_abs"].is_null());
        assert!(v[0]["min_value"].is_null());
    }

    #[test]
    fn csv_optional_columns() {
        let mut r = sample();
        let plain = to_csv(&[r.clone()]).unwrap();
        assert!(plain.starts_with("space,n,params,check,grid,points,errors,max_abs"));
        assert!(plain.lines().next().unwrap().ends_with(",pass"));
        assert!(plain.contains("m=1.0000000000000001e-1"));
        r.runtime_ms = Some(12);
        r.roots = Some((0.1, 0.9));
        let full = to_csv(&[r]).unwrap();
        assert!(full.lines().next().unwrap().ends_with(",pass,runtime_ms,r1,r2"));
    }

    #[test]
    fn pass_rule_consistency() {
        let mut r = sample();
        assert!(r.consistent());
        r.max_rel = 1.0;
        r.max_abs = 1.0;
        assert!(!r.consistent());
        r.pass = false;
        assert!(r.consistent());
    }

    #[test]
    fn format_from_extension() {
        assert_eq!(Format::from_path(Path::new("a/b.json")).unwrap(), Format::Json);
        assert_eq!(Format::from_path(Path::new("b.csv")).unwrap(), Format::Csv);
        assert!(Format::from_path(Path::new("b.txt")).is_err());
    }
}
