use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

use super::{row, Experiment, ExperimentConfig, ParamSpec, Report};
use crate::error::{Error, Result};
use crate::network::VertexMeasure;
use crate::resolvent::{mc_local_time, mc_resolvent, resolvent_apply, Comparison, ShortedKernel};
use crate::rng::RandomSeed;
use crate::spaces::random_network;

/// Exact-vs-Monte-Carlo comparison on one random network.
#[derive(Debug, Clone, Serialize)]
pub struct ResolventCase {
    pub case: usize,
    pub vertices: usize,
    /// `resolvent` (`G_x f(y)`) or `local-time` (`E_y L_{σ_A}(z)`).
    pub kind: &'static str,
    #[serde(flatten)]
    pub comparison: Comparison,
}

/// Draws `cases` random networks with `2..=max_vertices` vertices and
/// compares both estimators with their exact kernels.
///
/// Case `i` draws its network from `seed.derive(i)`; the two estimators use
/// `seed.derive(i).derive(1)` and `.derive(2)`.
pub fn run_resolvent_check(
    cases: usize,
    max_vertices: usize,
    samples: usize,
    c_range: (f64, f64),
    seed: RandomSeed,
) -> Result<Vec<ResolventCase>> {
    if max_vertices < 2 {
        return Err(Error::domain("max_vertices must be at least 2"));
    }
    let mut out = Vec::with_capacity(2 * cases);
    for case in 0..cases {
        let case_seed = seed.derive(case as u64);
        let mut rng = case_seed.rng();
        let n = rng.gen_range(2..=max_vertices);
        let net = random_network(n, 0.3, c_range.0, c_range.1, &mut rng)?;
        let mu = VertexMeasure::new((0..n).map(|_| rng.gen_range(0.5..2.0)).collect())?;
        let f: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let (x, y) = (order[0], order[1]);

        let r = net.resistance_matrix();
        let exact = resolvent_apply(&r, &mu, x, &f, y)?;
        let est = mc_resolvent(&net, &mu, x, &f, y, samples, case_seed.derive(1))?;
        out.push(ResolventCase {
            case,
            vertices: n,
            kind: "resolvent",
            comparison: Comparison::new(exact, &est),
        });

        // A holds x and possibly one more vertex; y and z lie outside it
        let set_size = if n >= 4 { rng.gen_range(1..=2) } else { 1 };
        let set = &order[..set_size];
        let y = order[set_size];
        let z = order[rng.gen_range(set_size..n)];
        let exact = ShortedKernel::new(&net, set)?.get(y, z);
        let est = mc_local_time(&net, &mu, set, y, z, samples, case_seed.derive(2))?;
        out.push(ResolventCase {
            case,
            vertices: n,
            kind: "local-time",
            comparison: Comparison::new(exact, &est),
        });
    }
    Ok(out)
}

pub(super) struct ResolventCheck;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "cases", default: "100", help: "number of random networks" },
    ParamSpec { key: "max-vertices", default: "12", help: "largest network size" },
    ParamSpec { key: "samples", default: "10000", help: "Monte Carlo runs per estimate" },
    ParamSpec { key: "c-min", default: "0.1", help: "smallest conductance (log-uniform)" },
    ParamSpec { key: "c-max", default: "10", help: "largest conductance (log-uniform)" },
    ParamSpec { key: "k", default: "4", help: "agreement band in standard errors" },
];

impl Experiment for ResolventCheck {
    fn name(&self) -> &'static str {
        "resolvent-check"
    }
    fn about(&self) -> &'static str {
        "Monte Carlo resolvent and local times against exact Green kernels"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let k: f64 = cfg.get("k")?;
        let cases = run_resolvent_check(
            cfg.get("cases")?,
            cfg.get("max-vertices")?,
            cfg.get("samples")?,
            (cfg.get("c-min")?, cfg.get("c-max")?),
            cfg.seed,
        )?;
        let mut report = Report::new(
            self.name(),
            cfg,
            &["case", "vertices", "kind", "exact", "mc_mean", "mc_se", "n", "z_score", "agrees"],
        );
        for c in &cases {
            let m = &c.comparison;
            report.push_row(row![
                c.case,
                c.vertices,
                c.kind,
                m.exact,
                m.mc_mean,
                m.mc_se,
                m.n,
                m.z_score,
                m.agrees(k)
            ]);
        }
        let agree = |kind: &str| {
            cases
                .iter()
                .filter(|c| c.kind == kind && c.comparison.agrees(k))
                .count()
        };
        let summary = serde_json::json!({
            "agree_resolvent": agree("resolvent"),
            "agree_local_time": agree("local-time"),
            "cases": cases,
        });
        report.with_data(&summary)
    }
}
