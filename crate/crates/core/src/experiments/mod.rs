//! Named, reproducible experiments behind a runtime registry.
//!
//! Each experiment is a typed function (usable directly from Rust) wrapped by
//! an [`Experiment`] implementation that parses string parameters and
//! renders a [`Report`]. Front ends look experiments up by name.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng::RandomSeed;

mod crg;
mod exit_bound;
mod fin;
mod gasket_scaling;
mod ghp;
mod resolvent_check;
mod tree_scaling;
mod vsrw_clock;

pub use crg::{run_crg, CrgResult, CrgRow, CrgSummary};
pub use exit_bound::{exit_bound_matrix, exit_test_spaces, ExitBoundCell};
pub use fin::{run_fin, Atom, AtomLevel, FinConfig, FinResult, Occupation};
pub use gasket_scaling::{run_gasket_scaling, ConductanceMode, GasketScalingRow};
pub use ghp::{gasket_corner_space, run_ghp_check, unit_path_space, GhpRow};
pub use resolvent_check::{run_resolvent_check, ResolventCase};
pub use tree_scaling::{run_tree_scaling, TreeScalingResult, TreeScalingRow};
pub use vsrw_clock::{run_vsrw_clock, VsrwClockResult, VsrwLevel};

/// Crate version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A parameter an experiment accepts, with its default as a string.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

/// Seed plus fully resolved string parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: RandomSeed,
    pub params: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn new(seed: impl Into<RandomSeed>) -> Self {
        ExperimentConfig {
            seed: seed.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_owned(), value.to_string());
        self
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.params
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::domain(format!("missing parameter `{key}`")))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.raw(key)?;
        raw.trim()
            .parse()
            .map_err(|_| Error::domain(format!("parameter `{key}`: cannot parse `{raw}`")))
    }

    /// A comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let raw = self.raw(key)?;
        raw.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::domain(format!("parameter `{key}`: cannot parse `{t}`")))
            })
            .collect()
    }
}

/// One experiment: metadata plus a run function over a resolved config.
pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn params(&self) -> &'static [ParamSpec];
    fn run(&self, config: &ExperimentConfig) -> Result<Report>;
}

/// Experiments by name, in registration order.
pub struct ExperimentRegistry {
    entries: Vec<Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        ExperimentRegistry { entries: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut r = ExperimentRegistry::empty();
        r.register(Box::new(resolvent_check::ResolventCheck));
        r.register(Box::new(gasket_scaling::GasketScaling));
        r.register(Box::new(vsrw_clock::VsrwClock));
        r.register(Box::new(fin::Fin));
        r.register(Box::new(tree_scaling::TreeScaling));
        r.register(Box::new(crg::Crg));
        r.register(Box::new(ghp::Ghp));
        r.register(Box::new(exit_bound::ExitBound));
        r
    }

    /// Adds an experiment, replacing any previous one with the same name.
    pub fn register(&mut self, exp: Box<dyn Experiment>) {
        self.entries.retain(|e| e.name() != exp.name());
        self.entries.push(exp);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.entries.iter().find(|e| e.name() == name).map(|e| e.as_ref())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Experiment> {
        self.entries.iter().map(|e| e.as_ref())
    }

    /// Fills defaults, rejects unknown keys, and runs.
    pub fn run(&self, name: &str, config: &ExperimentConfig) -> Result<Report> {
        let exp = self
            .get(name)
            .ok_or_else(|| Error::domain(format!("unknown experiment `{name}`")))?;
        let specs = exp.params();
        if let Some(k) = config.params.keys().find(|k| !specs.iter().any(|s| s.key == k.as_str())) {
            return Err(Error::domain(format!("experiment `{name}` has no parameter `{k}`")));
        }
        let mut resolved = config.clone();
        for s in specs {
            resolved
                .params
                .entry(s.key.to_owned())
                .or_insert_with(|| s.default.to_owned());
        }
        exp.run(&resolved)
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        ExperimentRegistry::builtin()
    }
}

/// A named sequence of points for convergence plots.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Output of one run: metadata, a flat table, nested data, plot series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub version: String,
    pub params: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub data: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<Series>,
}

impl Report {
    pub fn new(name: &str, config: &ExperimentConfig, columns: &[&str]) -> Self {
        Report {
            experiment: name.to_owned(),
            seed: config.seed.0,
            version: VERSION.to_owned(),
            params: config.params.clone(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            data: Value::Null,
            series: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_data(mut self, data: &impl Serialize) -> Result<Self> {
        self.data = serde_json::to_value(data)?;
        Ok(self)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Metadata as `#` comment lines, then the table.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment: {}", self.experiment);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# version: {}", self.version);
        for (k, v) in &self.params {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let mut wr = csv::Writer::from_writer(Vec::new());
        wr.write_record(&self.columns)?;
        for row in &self.rows {
            wr.write_record(row.iter().map(cell))?;
        }
        let bytes = wr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    /// Gnuplot data blocks, one per series, separated by two blank lines.
    pub fn to_plot_data(&self) -> String {
        let mut out = String::new();
        for s in &self.series {
            let _ = writeln!(out, "# {}", s.name);
            for (x, y) in &s.points {
                let _ = writeln!(out, "{x} {y}");
            }
            out.push_str("\n\n");
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Shorthand for building table rows.
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$(serde_json::json!($v)),*] };
}
pub(crate) use row;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_and_defaults() {
        let reg = ExperimentRegistry::builtin();
        let names: Vec<_> = reg.iter().map(|e| e.name()).collect();
        assert_eq!(
            names,
            [
                "resolvent-check",
                "gasket-scaling",
                "vsrw-clock",
                "fin",
                "tree-scaling",
                "crg",
                "ghp",
                "exit-bound"
            ]
        );
        for e in reg.iter() {
            let mut keys: Vec<_> = e.params().iter().map(|p| p.key).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), e.params().len(), "{}", e.name());
        }
    }

    #[test]
    fn unknown_names_and_keys_are_rejected() {
        let reg = ExperimentRegistry::builtin();
        let cfg = ExperimentConfig::new(1);
        assert!(reg.run("nope", &cfg).is_err());
        assert!(reg.run("gasket-scaling", &cfg.clone().with("bogus", 1)).is_err());
    }

    #[test]
    fn config_parsing() {
        let cfg = ExperimentConfig::new(0).with("levels", "1, 2,3").with("alpha", "0.5");
        assert_eq!(cfg.list::<u32>("levels").unwrap(), vec![1, 2, 3]);
        assert_eq!(cfg.get::<f64>("alpha").unwrap(), 0.5);
        assert!(cfg.get::<u32>("alpha").is_err());
        assert!(cfg.get::<u32>("missing").is_err());
    }

    #[test]
    fn csv_rendering() {
        let cfg = ExperimentConfig::new(7).with("k", "v");
        let mut r = Report::new("demo", &cfg, &["a", "b"]);
        r.push_row(row!["x", 1.5]);
        let csv = r.to_csv().unwrap();
        assert_eq!(
            csv,
            format!("# experiment: demo\n# seed: 7\n# version: {VERSION}\n# k: v\na,b\nx,1.5\n")
        );
    }
}
