use serde::Serialize;

use super::{row, Experiment, ExperimentConfig, ParamSpec, Report, Series};
use crate::error::{Error, Result};
use crate::network::{Network, Vertex, VertexMeasure};
use crate::rng::{replicate, RandomSeed};
use crate::spaces::{gasket_graph, heavy_tailed_conductances};
use crate::stats::{McEstimate, Quartiles};
use crate::walk::WalkKernel;

pub const MAX_LEVEL: u32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub vertex: String,
    /// `3^(-n/α) c(x)`.
    pub mass: f64,
}

/// Time share spent at the heaviest vertex, against the uniform share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupation {
    pub horizon: f64,
    pub fraction: McEstimate,
    /// `fraction · |V|`: how many uniform shares the top atom receives.
    pub factor: f64,
    pub factor_se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomLevel {
    pub level: u32,
    /// `max_x c(x) / Σ_x c(x)` over seeds.
    pub max_share: McEstimate,
    /// Total mass of `ν_n` over seeds.
    pub total_mass: Quartiles,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinResult {
    pub level: u32,
    pub alpha: f64,
    pub vertices: usize,
    pub top_atoms: Vec<Atom>,
    pub top_vertex: String,
    pub csrw: Occupation,
    pub vsrw: Occupation,
    pub atom_trend: Vec<AtomLevel>,
}

/// Sizes and sample counts for [`run_fin`].
#[derive(Debug, Clone, PartialEq)]
pub struct FinConfig {
    pub level: u32,
    pub alpha: f64,
    pub samples: usize,
    pub vsrw_samples: usize,
    pub top_k: usize,
    pub trend_levels: Vec<u32>,
    pub trend_seeds: usize,
}

fn occupation(
    net: &Network,
    mu: &VertexMeasure,
    start: Vertex,
    target: Vertex,
    horizon: f64,
    samples: usize,
    seed: RandomSeed,
) -> Result<Occupation> {
    let kernel = WalkKernel::new(net, mu)?;
    let fractions = replicate(samples, seed, |_, rng| {
        let mut occ = 0.0;
        kernel.run_until(start, horizon, rng, |v, t0, t1| {
            if v == target {
                occ += t1 - t0;
            }
            true
        });
        occ / horizon
    });
    let fraction = McEstimate::from_samples(&fractions);
    let n = net.len() as f64;
    Ok(Occupation {
        horizon,
        fraction,
        factor: fraction.mean * n,
        factor_se: fraction.std_error * n,
    })
}

/// Heavy-tailed conductances on gasket level `n` (drawn from
/// `seed.derive(0)`), then occupation of the heaviest vertex by the CSRW over
/// `(5/3)^n 3^(n/α)` and by the VSRW over `5^n`, both from corner 0 (streams
/// `seed.derive(1)` and `seed.derive(2)`). The atom trend at level `m` uses
/// `seed.derive(100 + m).derive(j)`.
pub fn run_fin(cfg: &FinConfig, seed: RandomSeed) -> Result<FinResult> {
    let alpha = cfg.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    if cfg.level > MAX_LEVEL || cfg.trend_levels.iter().any(|&l| l > MAX_LEVEL) {
        return Err(Error::domain(format!("levels are limited to {MAX_LEVEL}")));
    }
    if cfg.samples == 0 || cfg.vsrw_samples == 0 || cfg.trend_seeds == 0 {
        return Err(Error::domain("sample counts must be positive"));
    }
    let n = cfg.level as i32;
    let g = gasket_graph(cfg.level)?;
    let net = heavy_tailed_conductances(&g.net, alpha, seed.derive(0))?;
    let atom_scale = 3f64.powf(-(n as f64) / alpha);

    let mut order: Vec<Vertex> = (0..net.len()).collect();
    order.sort_by(|&a, &b| net.weighted_degree(b).total_cmp(&net.weighted_degree(a)).then(a.cmp(&b)));
    let top = order[0];
    let top_atoms = order
        .iter()
        .take(cfg.top_k)
        .map(|&v| Atom {
            vertex: net.label(v).to_owned(),
            mass: atom_scale * net.weighted_degree(v),
        })
        .collect();

    let start = g.corners[0];
    let csrw_horizon = (5.0f64 / 3.0).powi(n) * 3f64.powf(n as f64 / alpha);
    let csrw = occupation(
        &net,
        &VertexMeasure::csrw(&net),
        start,
        top,
        csrw_horizon,
        cfg.samples,
        seed.derive(1),
    )?;
    let vsrw = occupation(
        &net,
        &VertexMeasure::vsrw(&net),
        start,
        top,
        5f64.powi(n),
        cfg.vsrw_samples,
        seed.derive(2),
    )?;

    let mut atom_trend = Vec::new();
    for &level in &cfg.trend_levels {
        let base = gasket_graph(level)?;
        let scale = 3f64.powf(-(level as f64) / alpha);
        let mut shares = Vec::with_capacity(cfg.trend_seeds);
        let mut totals = Vec::with_capacity(cfg.trend_seeds);
        for j in 0..cfg.trend_seeds {
            let s = seed.derive(100 + level as u64).derive(j as u64);
            let w = heavy_tailed_conductances(&base.net, alpha, s)?;
            let total: f64 = w.weighted_degrees().iter().sum();
            let max = w.weighted_degrees().iter().copied().fold(0.0, f64::max);
            shares.push(max / total);
            totals.push(scale * total);
        }
        atom_trend.push(AtomLevel {
            level,
            max_share: McEstimate::from_samples(&shares),
            total_mass: Quartiles::of(&totals),
        });
    }

    Ok(FinResult {
        level: cfg.level,
        alpha,
        vertices: net.len(),
        top_atoms,
        top_vertex: net.label(top).to_owned(),
        csrw,
        vsrw,
        atom_trend,
    })
}

pub(super) struct Fin;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "level", default: "4", help: "gasket level (at most 5)" },
    ParamSpec { key: "alpha", default: "0.5", help: "Pareto tail index in (0,1)" },
    ParamSpec { key: "samples", default: "1000", help: "CSRW runs" },
    ParamSpec { key: "vsrw-samples", default: "1000", help: "VSRW control runs" },
    ParamSpec { key: "top-k", default: "5", help: "atoms to list" },
    ParamSpec { key: "trend-levels", default: "2,3,4,5", help: "levels for the max-atom share trend" },
    ParamSpec { key: "trend-seeds", default: "20", help: "conductance draws per trend level" },
];

impl Experiment for Fin {
    fn name(&self) -> &'static str {
        "fin"
    }
    fn about(&self) -> &'static str {
        "Trapping of the CSRW at heavy atoms versus the VSRW control"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, c: &ExperimentConfig) -> Result<Report> {
        let cfg = FinConfig {
            level: c.get("level")?,
            alpha: c.get("alpha")?,
            samples: c.get("samples")?,
            vsrw_samples: c.get("vsrw-samples")?,
            top_k: c.get("top-k")?,
            trend_levels: c.list("trend-levels")?,
            trend_seeds: c.get("trend-seeds")?,
        };
        let res = run_fin(&cfg, c.seed)?;
        let mut report = Report::new(
            self.name(),
            c,
            &["walk", "horizon", "top_vertex", "fraction", "fraction_se", "factor", "factor_se"],
        );
        for (name, occ) in [("csrw", &res.csrw), ("vsrw", &res.vsrw)] {
            report.push_row(row![
                name,
                occ.horizon,
                res.top_vertex,
                occ.fraction.mean,
                occ.fraction.std_error,
                occ.factor,
                occ.factor_se
            ]);
        }
        report.series.push(Series {
            name: "max atom share".into(),
            points: res
                .atom_trend
                .iter()
                .map(|a| (a.level as f64, a.max_share.mean))
                .collect(),
        });
        report.with_data(&res)
    }
}
