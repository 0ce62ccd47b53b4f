use std::str::FromStr;

use serde::Serialize;

use super::{row, Experiment, ExperimentConfig, ParamSpec, Report, Series};
use crate::error::{Error, Result};
use crate::rng::RandomSeed;
use crate::spaces::{gasket_graph, heavy_tailed_conductances};
use crate::stats::McEstimate;

/// Highest level this experiment accepts.
pub const MAX_LEVEL: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum ConductanceMode {
    Unit,
    Heavy { alpha: f64 },
}

impl FromStr for ConductanceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(ConductanceMode::Unit),
            "heavy" => Ok(ConductanceMode::Heavy { alpha: 0.5 }),
            other => Err(Error::domain(format!("unknown conductance mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasketScalingRow {
    pub level: u32,
    pub vertices: usize,
    /// Mean of `(3/5)^n R_n(corner 0, corner 1)` over seeds.
    pub mean: f64,
    pub std_error: f64,
    /// Sample standard deviation divided by the mean.
    pub rel_spread: f64,
    pub samples: usize,
}

/// Rescaled corner-to-corner resistance for levels `0..=max_level`.
///
/// Heavy mode draws replicate `j` at level `n` from `seed.derive(n).derive(j)`.
pub fn run_gasket_scaling(
    max_level: u32,
    mode: ConductanceMode,
    seeds: usize,
    seed: RandomSeed,
) -> Result<Vec<GasketScalingRow>> {
    if max_level > MAX_LEVEL {
        return Err(Error::domain(format!("max level {max_level} exceeds {MAX_LEVEL}")));
    }
    let mut rows = Vec::new();
    for level in 0..=max_level {
        let g = gasket_graph(level)?;
        let scale = (3.0f64 / 5.0).powi(level as i32);
        let values: Vec<f64> = match mode {
            ConductanceMode::Unit => {
                vec![scale * g.net.effective_resistance(g.corners[0], g.corners[1])?]
            }
            ConductanceMode::Heavy { alpha } => {
                if seeds < 2 {
                    return Err(Error::domain("heavy mode needs at least two seeds"));
                }
                (0..seeds)
                    .map(|j| {
                        let s = seed.derive(level as u64).derive(j as u64);
                        let net = heavy_tailed_conductances(&g.net, alpha, s)?;
                        Ok(scale * net.effective_resistance(g.corners[0], g.corners[1])?)
                    })
                    .collect::<Result<_>>()?
            }
        };
        let est = McEstimate::from_samples(&values);
        let sd = est.std_error * (values.len() as f64).sqrt();
        rows.push(GasketScalingRow {
            level,
            vertices: g.net.len(),
            mean: est.mean,
            std_error: est.std_error,
            rel_spread: sd / est.mean,
            samples: values.len(),
        });
    }
    Ok(rows)
}

pub(super) struct GasketScaling;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "max-level", default: "5", help: "largest gasket level (at most 7)" },
    ParamSpec { key: "mode", default: "unit", help: "conductances: unit or heavy" },
    ParamSpec { key: "alpha", default: "0.5", help: "Pareto tail index for heavy mode, in (0,1)" },
    ParamSpec { key: "seeds", default: "20", help: "replicates per level in heavy mode" },
];

impl Experiment for GasketScaling {
    fn name(&self) -> &'static str {
        "gasket-scaling"
    }
    fn about(&self) -> &'static str {
        "Renormalized corner resistance (3/5)^n R_n on gasket graphs"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let mode = match cfg.get::<String>("mode")?.parse()? {
            ConductanceMode::Heavy { .. } => ConductanceMode::Heavy { alpha: cfg.get("alpha")? },
            unit => unit,
        };
        let rows = run_gasket_scaling(cfg.get("max-level")?, mode, cfg.get("seeds")?, cfg.seed)?;
        let mut report = Report::new(
            self.name(),
            cfg,
            &["level", "vertices", "rescaled_resistance", "se", "rel_spread", "samples"],
        );
        for r in &rows {
            report.push_row(row![r.level, r.vertices, r.mean, r.std_error, r.rel_spread, r.samples]);
        }
        report.series.push(Series {
            name: "rescaled corner resistance".into(),
            points: rows.iter().map(|r| (r.level as f64, r.mean)).collect(),
        });
        report.with_data(&serde_json::json!({ "mode": mode, "levels": rows }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_mode_is_constant() {
        let rows = run_gasket_scaling(4, ConductanceMode::Unit, 1, RandomSeed(0)).unwrap();
        assert_close!(rows[0].mean, 2.0 / 3.0, 1e-12);
        for r in &rows {
            assert_close!(r.mean, 2.0 / 3.0, 1e-9);
            assert_eq!(r.std_error, 0.0);
        }
    }

    #[test]
    fn heavy_mode_is_seeded_and_spread() {
        let mode = ConductanceMode::Heavy { alpha: 0.5 };
        let a = run_gasket_scaling(2, mode, 5, RandomSeed(1)).unwrap();
        let b = run_gasket_scaling(2, mode, 5, RandomSeed(1)).unwrap();
        assert_eq!(a, b);
        assert!(a[1].rel_spread > 0.0);
        assert!(run_gasket_scaling(8, mode, 5, RandomSeed(1)).is_err());
    }
}
