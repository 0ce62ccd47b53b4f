use serde::Serialize;

use super::{row, Experiment, ExperimentConfig, ParamSpec, Report, Series};
use crate::compare::ghp_distance_detailed;
use crate::error::{Error, Result};
use crate::network::VertexMeasure;
use crate::spaces::{as_mm_space, gasket_graph, path_graph, FiniteMMSpace};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhpRow {
    pub family: &'static str,
    pub left: String,
    pub right: String,
    pub distance: f64,
    pub distortion: f64,
    pub transport_defect: f64,
}

/// The three corners of gasket level `n`, distances scaled by `(3/5)^n`,
/// uniform probability measure, rooted at corner 0.
pub fn gasket_corner_space(level: u32) -> Result<FiniteMMSpace> {
    let g = gasket_graph(level)?;
    let full = as_mm_space(
        &g.net,
        &VertexMeasure::vsrw(&g.net),
        g.corners[0],
        (3.0f64 / 5.0).powi(level as i32),
        1.0,
    )?;
    full.subspace(&g.corners, Some(vec![1.0 / 3.0; 3]), g.corners[0])
}

/// Path with `k` edges and total resistance 1, uniform probability
/// measure, rooted at an endpoint.
pub fn unit_path_space(k: usize) -> Result<FiniteMMSpace> {
    let net = path_graph(k, 1.0)?;
    let mu = VertexMeasure::uniform(k + 1, 1.0 / (k + 1) as f64);
    as_mm_space(&net, &mu, 0, 1.0, 1.0)
}

fn compare(family: &'static str, left: String, a: &FiniteMMSpace, right: String, b: &FiniteMMSpace) -> Result<GhpRow> {
    let d = ghp_distance_detailed(a, b)?;
    Ok(GhpRow {
        family,
        left,
        right,
        distance: d.distance,
        distortion: d.distortion,
        transport_defect: d.transport_defect,
    })
}

/// Identical pair, gasket corner triples at levels `n` and `n + 1` for
/// `n < max_level`, and unit paths `P_k` against `P_2k` for `k <= max_k`.
pub fn run_ghp_check(max_level: u32, max_k: usize) -> Result<Vec<GhpRow>> {
    if max_k == 0 {
        return Err(Error::domain("max_k must be at least 1"));
    }
    let mut rows = Vec::new();
    let g1 = gasket_graph(1)?;
    let s = as_mm_space(&g1.net, &VertexMeasure::vsrw(&g1.net), 0, 1.0, 1.0)?;
    rows.push(compare("identical", "gasket-1".into(), &s, "gasket-1".into(), &s)?);
    for n in 0..max_level {
        rows.push(compare(
            "gasket-corners",
            format!("level-{n}"),
            &gasket_corner_space(n)?,
            format!("level-{}", n + 1),
            &gasket_corner_space(n + 1)?,
        )?);
    }
    for k in 1..=max_k {
        rows.push(compare(
            "paths",
            format!("P{k}"),
            &unit_path_space(k)?,
            format!("P{}", 2 * k),
            &unit_path_space(2 * k)?,
        )?);
    }
    Ok(rows)
}

pub(super) struct Ghp;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "max-level", default: "4", help: "gasket corner triples compared up to this level" },
    ParamSpec { key: "max-k", default: "3", help: "paths P_k vs P_2k for k up to this" },
];

impl Experiment for Ghp {
    fn name(&self) -> &'static str {
        "ghp"
    }
    fn about(&self) -> &'static str {
        "Gromov-Hausdorff-Prohorov distances between successive coarse-grainings"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let rows = run_ghp_check(cfg.get("max-level")?, cfg.get("max-k")?)?;
        let mut report = Report::new(
            self.name(),
            cfg,
            &["family", "left", "right", "distance", "distortion", "transport_defect"],
        );
        for r in &rows {
            report.push_row(row![r.family, r.left, r.right, r.distance, r.distortion, r.transport_defect]);
        }
        report.series.push(Series {
            name: "paths P_k vs P_2k".into(),
            points: rows
                .iter()
                .filter(|r| r.family == "paths")
                .enumerate()
                .map(|(i, r)| ((i + 1) as f64, r.distance))
                .collect(),
        });
        report.with_data(&rows)
    }
}
