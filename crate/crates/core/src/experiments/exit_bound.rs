use serde::Serialize;

use super::{row, Experiment, ExperimentConfig, ParamSpec, Report};
use crate::compare::{exit_bound_report, ExitBoundReport};
use crate::error::{Error, Result};
use crate::network::{Network, VertexMeasure};
use crate::rng::RandomSeed;
use crate::spaces::{gasket_graph, gw_tree, path_graph, GeometricHalf};

/// One `(space, ε, t)` cell of the test matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitBoundCell {
    pub space: String,
    pub eps_fraction: f64,
    pub t_fraction: f64,
    #[serde(flatten)]
    pub report: ExitBoundReport,
}

impl ExitBoundCell {
    /// Whether the estimate stays below the bound plus `k` standard errors.
    pub fn holds(&self, k: f64) -> bool {
        self.report.mc_sup <= self.report.bound + k * self.report.mc_se
    }
}

/// Gasket levels 1-3, paths with 4 and 8 edges, and `trees` geometric
/// Galton-Watson trees of size `tree_size` (tree `i` from
/// `seed.derive(1000 + i)`), all with unit conductances and `μ ≡ 1`.
pub fn exit_test_spaces(trees: usize, tree_size: usize, seed: RandomSeed) -> Result<Vec<(String, Network)>> {
    let mut spaces = Vec::new();
    for level in 1..=3 {
        spaces.push((format!("gasket-{level}"), gasket_graph(level)?.net));
    }
    for k in [4, 8] {
        spaces.push((format!("path-{k}"), path_graph(k, k as f64)?));
    }
    for i in 0..trees {
        let t = gw_tree(&GeometricHalf, tree_size, seed.derive(1000 + i as u64))?;
        spaces.push((format!("tree-{i}"), t.net));
    }
    Ok(spaces)
}

/// Runs every cell: `ε = e · diam` and `t = τ · diam · μ(F)` for each
/// listed fraction. Cell `c` (in row-major order) uses `seed.derive(c)`.
pub fn exit_bound_matrix(
    spaces: &[(String, Network)],
    eps_fractions: &[f64],
    t_fractions: &[f64],
    samples: usize,
    seed: RandomSeed,
) -> Result<Vec<ExitBoundCell>> {
    if eps_fractions.iter().chain(t_fractions).any(|&f| !(f > 0.0 && f.is_finite())) {
        return Err(Error::domain("fractions must be positive"));
    }
    let mut cells = Vec::new();
    for (name, net) in spaces {
        let mu = VertexMeasure::vsrw(net);
        let diam = net.resistance_matrix().diameter();
        for &e in eps_fractions {
            for &tau in t_fractions {
                let t = tau * diam * mu.total();
                let report = exit_bound_report(net, &mu, e * diam, t, samples, seed.derive(cells.len() as u64))?;
                cells.push(ExitBoundCell {
                    space: name.clone(),
                    eps_fraction: e,
                    t_fraction: tau,
                    report,
                });
            }
        }
    }
    Ok(cells)
}

pub(super) struct ExitBound;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "samples", default: "1000", help: "walks per start vertex" },
    ParamSpec { key: "eps", default: "0.25,0.5", help: "eps as fractions of the diameter" },
    ParamSpec { key: "t", default: "0.001,0.03,1", help: "t as fractions of diameter x total mass" },
    ParamSpec { key: "trees", default: "5", help: "random trees in the matrix" },
    ParamSpec { key: "tree-size", default: "20", help: "vertices per random tree" },
    ParamSpec { key: "k", default: "4", help: "allowed standard errors above the bound" },
];

impl Experiment for ExitBound {
    fn name(&self) -> &'static str {
        "exit-bound"
    }
    fn about(&self) -> &'static str {
        "Monte Carlo exit probabilities against the covering-number exit-time bound"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let k: f64 = cfg.get("k")?;
        let spaces = exit_test_spaces(cfg.get("trees")?, cfg.get("tree-size")?, cfg.seed)?;
        let cells = exit_bound_matrix(&spaces, &cfg.list("eps")?, &cfg.list("t")?, cfg.get("samples")?, cfg.seed)?;
        let mut report = Report::new(
            self.name(),
            cfg,
            &["space", "eps", "delta", "t", "bound", "mc_sup", "mc_se", "holds"],
        );
        for c in &cells {
            let r = &c.report;
            report.push_row(row![c.space, r.eps, r.delta, r.t, r.bound, r.mc_sup, r.mc_se, c.holds(k)]);
        }
        report.with_data(&cells)
    }
}
