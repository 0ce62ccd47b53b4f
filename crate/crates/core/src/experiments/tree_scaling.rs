use rand::Rng as _;
use serde::Serialize;

use super::{row, Experiment, ExperimentConfig, ParamSpec, Report, Series};
use crate::error::{Error, Result};
use crate::network::VertexMeasure;
use crate::rng::{replicate, RandomSeed};
use crate::spaces::{gw_tree, offspring_law};
use crate::stats::{ratio_std_error, McEstimate};
use crate::walk::WalkKernel;

pub const MAX_SIZE: usize = 10_000;

/// Mean rescaled displacement for one tree size at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeScalingRow {
    pub size: usize,
    pub t: f64,
    /// `n^(-1/2) · depth(X_{t n^(3/2)})`.
    pub displacement: McEstimate,
    /// Against the previous size at the same `t`.
    pub ratio: Option<f64>,
    pub ratio_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeScalingResult {
    pub offspring: String,
    pub rows: Vec<TreeScalingRow>,
}

impl TreeScalingResult {
    pub fn row(&self, size: usize, t: f64) -> Option<&TreeScalingRow> {
        self.rows.iter().find(|r| r.size == size && r.t == t)
    }
}

/// Positions of a walk at the sorted times `grid`.
pub(crate) fn positions_at(
    kernel: &WalkKernel<'_>,
    start: usize,
    grid: &[f64],
    rng: &mut crate::rng::Rng,
) -> Vec<usize> {
    let horizon = grid.last().copied().unwrap_or(0.0);
    let mut out = Vec::with_capacity(grid.len());
    let mut last = start;
    kernel.run_until(start, horizon, rng, |v, _, t1| {
        while out.len() < grid.len() && grid[out.len()] < t1 {
            out.push(v);
        }
        last = v;
        true
    });
    out.resize(grid.len(), last);
    out
}

/// Annealed run: every replicate draws a fresh conditioned tree and runs a
/// VSRW from its root. Size `n` uses `seed.derive(n)`.
pub fn run_tree_scaling(
    sizes: &[usize],
    offspring: &str,
    times: &[f64],
    samples: usize,
    seed: RandomSeed,
) -> Result<TreeScalingResult> {
    let law = offspring_law(offspring)?;
    if samples < 2 {
        return Err(Error::domain("need at least two samples"));
    }
    if times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("times must be finite, nonnegative and increasing"));
    }
    let mut rows: Vec<TreeScalingRow> = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        if n == 0 || n > MAX_SIZE {
            return Err(Error::domain(format!("tree size {n} outside 1..={MAX_SIZE}")));
        }
        let clock = (n as f64).powf(1.5);
        let grid: Vec<f64> = times.iter().map(|t| t * clock).collect();
        let scale = (n as f64).sqrt();
        let runs = replicate(samples, seed.derive(n as u64), |_, rng| -> Result<Vec<f64>> {
            let tree = gw_tree(law.as_ref(), n, RandomSeed(rng.gen()))?;
            let depth = tree.depths();
            let kernel = WalkKernel::new(&tree.net, &VertexMeasure::vsrw(&tree.net))?;
            Ok(positions_at(&kernel, tree.root, &grid, rng)
                .into_iter()
                .map(|v| depth[v] as f64 / scale)
                .collect())
        });
        let runs: Vec<Vec<f64>> = runs.into_iter().collect::<Result<_>>()?;
        for (ti, &t) in times.iter().enumerate() {
            let column: Vec<f64> = runs.iter().map(|r| r[ti]).collect();
            let displacement = McEstimate::from_samples(&column);
            let prev = (si > 0).then(|| rows[rows.len() - times.len()].displacement);
            let (ratio, ratio_se) = match prev {
                Some(p) if p.mean > 0.0 => (
                    Some(displacement.mean / p.mean),
                    Some(ratio_std_error(displacement.mean, displacement.std_error, p.mean, p.std_error)),
                ),
                _ => (None, None),
            };
            rows.push(TreeScalingRow {
                size: n,
                t,
                displacement,
                ratio,
                ratio_se,
            });
        }
    }
    Ok(TreeScalingResult {
        offspring: law.name(),
        rows,
    })
}

pub(super) struct TreeScaling;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "sizes", default: "400,1600", help: "tree sizes (at most 10^4)" },
    ParamSpec { key: "offspring", default: "geometric", help: "geometric, poisson or pmf:p0,p1,..." },
    ParamSpec { key: "times", default: "0,0.1,0.25,0.5", help: "rescaled times t (walk time t n^1.5)" },
    ParamSpec { key: "samples", default: "1000", help: "trees and walks per size" },
];

impl Experiment for TreeScaling {
    fn name(&self) -> &'static str {
        "tree-scaling"
    }
    fn about(&self) -> &'static str {
        "n^1/2 space and n^3/2 time scaling of walks on critical Galton-Watson trees"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let res = run_tree_scaling(
            &cfg.list("sizes")?,
            &cfg.get::<String>("offspring")?,
            &cfg.list("times")?,
            cfg.get("samples")?,
            cfg.seed,
        )?;
        let mut report = Report::new(
            self.name(),
            cfg,
            &["size", "t", "displacement", "se", "ratio", "ratio_se"],
        );
        for r in &res.rows {
            report.push_row(row![
                r.size,
                r.t,
                r.displacement.mean,
                r.displacement.std_error,
                r.ratio,
                r.ratio_se
            ]);
        }
        let mut sizes: Vec<usize> = res.rows.iter().map(|r| r.size).collect();
        sizes.dedup();
        for n in sizes {
            report.series.push(Series {
                name: format!("n = {n}"),
                points: res
                    .rows
                    .iter()
                    .filter(|r| r.size == n)
                    .map(|r| (r.t, r.displacement.mean))
                    .collect(),
            });
        }
        report.with_data(&res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_and_single_vertex_give_zero() {
        let res = run_tree_scaling(&[1, 30], "geometric", &[0.0, 0.5], 20, RandomSeed(1)).unwrap();
        for r in &res.rows {
            if r.size == 1 || r.t == 0.0 {
                assert_eq!(r.displacement.mean, 0.0, "{r:?}");
            }
        }
        assert!(res.row(30, 0.5).unwrap().displacement.mean > 0.0);
    }

    #[test]
    fn positions_follow_grid() {
        let net = crate::spaces::path_graph(3, 3.0).unwrap();
        let kernel = WalkKernel::new(&net, &VertexMeasure::vsrw(&net)).unwrap();
        let mut rng = RandomSeed(2).rng();
        let pos = positions_at(&kernel, 0, &[0.0, 1.0, 2.0, 50.0], &mut rng);
        assert_eq!(pos.len(), 4);
        assert_eq!(pos[0], 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(run_tree_scaling(&[0], "geometric", &[0.1], 10, RandomSeed(0)).is_err());
        assert!(run_tree_scaling(&[10], "binomial", &[0.1], 10, RandomSeed(0)).is_err());
        assert!(run_tree_scaling(&[10], "geometric", &[0.5, 0.1], 10, RandomSeed(0)).is_err());
    }
}
