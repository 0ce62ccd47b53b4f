use serde::Serialize;

use super::tree_scaling::positions_at;
use super::{row, Experiment, ExperimentConfig, ParamSpec, Report};
use crate::error::{Error, Result};
use crate::network::VertexMeasure;
use crate::rng::{replicate, RandomSeed};
use crate::spaces::er_giant_component;
use crate::stats::{median_std_error, McEstimate, Quartiles};
use crate::walk::WalkKernel;

pub const MAX_N: usize = 100_000;

/// One largest component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrgRow {
    pub n: usize,
    pub replicate: usize,
    pub size: usize,
    /// `size · n^(-2/3)`.
    pub size_scaled: f64,
    pub resistance_diameter: f64,
    /// `diam_R · n^(-1/3)`.
    pub diameter_scaled: f64,
    pub graph_diameter: usize,
    /// Whether `R(x, y) <= d(x, y)` held for every pair.
    pub resistance_below_graph_distance: bool,
    /// `n^(-1/3) R(ρ, X_{t n})` per time, VSRW from the smallest label.
    pub displacement: Vec<McEstimate>,
}

/// Medians over replicates for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrgSummary {
    pub n: usize,
    pub size_scaled: Quartiles,
    pub size_scaled_median_se: f64,
    pub diameter_scaled: Quartiles,
    pub diameter_scaled_median_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrgResult {
    pub times: Vec<f64>,
    pub rows: Vec<CrgRow>,
    pub summary: Vec<CrgSummary>,
}

impl CrgResult {
    pub fn summary_for(&self, n: usize) -> Option<&CrgSummary> {
        self.summary.iter().find(|s| s.n == n)
    }
}

/// Largest components of `G(n, p)` with `p = 1/n` unless overridden.
/// Replicate `j` at size `n` uses `seed.derive(n).derive(j)` for the graph
/// and `.derive(1)` of that for the walks.
pub fn run_crg(
    sizes: &[usize],
    replicates: usize,
    walks: usize,
    times: &[f64],
    p: Option<f64>,
    seed: RandomSeed,
) -> Result<CrgResult> {
    if replicates == 0 || walks < 2 {
        return Err(Error::domain("need at least one replicate and two walks"));
    }
    if times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("times must be finite, nonnegative and increasing"));
    }
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &n in sizes {
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::domain(format!("n = {n} outside 2..={MAX_N}")));
        }
        let prob = p.unwrap_or(1.0 / n as f64);
        let nf = n as f64;
        let grid: Vec<f64> = times.iter().map(|t| t * nf).collect();
        let first = rows.len();
        for j in 0..replicates {
            let s = seed.derive(n as u64).derive(j as u64);
            let net = er_giant_component(n, prob, s)?;
            let r = net.resistance_matrix();
            let mut graph_diameter = 0;
            let mut below = true;
            for x in 0..net.len() {
                let hops = net.hop_distances(x);
                for (y, &h) in hops.iter().enumerate() {
                    graph_diameter = graph_diameter.max(h);
                    below &= r.get(x, y) <= h as f64 * (1.0 + 1e-12);
                }
            }
            let kernel = WalkKernel::new(&net, &VertexMeasure::vsrw(&net))?;
            let paths = replicate(walks, s.derive(1), |_, rng| positions_at(&kernel, 0, &grid, rng));
            let displacement = (0..times.len())
                .map(|ti| {
                    let d: Vec<f64> = paths.iter().map(|p| r.get(0, p[ti]) / nf.cbrt()).collect();
                    McEstimate::from_samples(&d)
                })
                .collect();
            rows.push(CrgRow {
                n,
                replicate: j,
                size: net.len(),
                size_scaled: net.len() as f64 / nf.powf(2.0 / 3.0),
                resistance_diameter: r.diameter(),
                diameter_scaled: r.diameter() / nf.cbrt(),
                graph_diameter,
                resistance_below_graph_distance: below,
                displacement,
            });
        }
        let sizes: Vec<f64> = rows[first..].iter().map(|r| r.size_scaled).collect();
        let diams: Vec<f64> = rows[first..].iter().map(|r| r.diameter_scaled).collect();
        let batches = (replicates / 6).max(2);
        summary.push(CrgSummary {
            n,
            size_scaled: Quartiles::of(&sizes),
            size_scaled_median_se: median_std_error(&sizes, batches),
            diameter_scaled: Quartiles::of(&diams),
            diameter_scaled_median_se: median_std_error(&diams, batches),
        });
    }
    Ok(CrgResult {
        times: times.to_vec(),
        rows,
        summary,
    })
}

pub(super) struct Crg;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "sizes", default: "1000,10000", help: "vertex counts n (at most 10^5)" },
    ParamSpec { key: "seeds", default: "30", help: "graphs per n" },
    ParamSpec { key: "samples", default: "100", help: "walks per graph" },
    ParamSpec { key: "times", default: "0.25,1", help: "rescaled times t (walk time t n)" },
    ParamSpec { key: "p", default: "", help: "edge probability (default 1/n)" },
];

impl Experiment for Crg {
    fn name(&self) -> &'static str {
        "crg"
    }
    fn about(&self) -> &'static str {
        "n^2/3 size and n^1/3 resistance scaling of critical Erdos-Renyi components"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let p = match cfg.get::<String>("p")?.trim() {
            "" => None,
            _ => Some(cfg.get("p")?),
        };
        let times: Vec<f64> = cfg.list("times")?;
        let res = run_crg(&cfg.list("sizes")?, cfg.get("seeds")?, cfg.get("samples")?, &times, p, cfg.seed)?;
        let mut columns = vec![
            "n".to_owned(),
            "replicate".into(),
            "size".into(),
            "size_scaled".into(),
            "resistance_diameter".into(),
            "diameter_scaled".into(),
            "graph_diameter".into(),
            "r_le_graph_distance".into(),
        ];
        for t in &times {
            columns.push(format!("disp_t{t}"));
            columns.push(format!("disp_t{t}_se"));
        }
        let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
        let mut report = Report::new(self.name(), cfg, &cols);
        for r in &res.rows {
            let mut cells = row![
                r.n,
                r.replicate,
                r.size,
                r.size_scaled,
                r.resistance_diameter,
                r.diameter_scaled,
                r.graph_diameter,
                r.resistance_below_graph_distance
            ];
            for d in &r.displacement {
                cells.extend(row![d.mean, d.std_error]);
            }
            report.push_row(cells);
        }
        report.with_data(&res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_degenerate_case() {
        let res = run_crg(&[40], 2, 10, &[0.0, 1.0], Some(1.0), RandomSeed(0)).unwrap();
        for r in &res.rows {
            assert_eq!(r.size, 40);
            assert_eq!(r.graph_diameter, 1);
            assert_close!(r.resistance_diameter, 2.0 / 40.0, 1e-12);
            assert!(r.diameter_scaled < 0.02);
            assert!(r.resistance_below_graph_distance);
            assert_eq!(r.displacement[0].mean, 0.0);
        }
    }

    #[test]
    fn critical_components_are_seeded() {
        let a = run_crg(&[300], 3, 5, &[0.5], None, RandomSeed(8)).unwrap();
        let b = run_crg(&[300], 3, 5, &[0.5], None, RandomSeed(8)).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().all(|r| r.resistance_below_graph_distance));
        assert!(a.summary_for(300).is_some());
    }
}
