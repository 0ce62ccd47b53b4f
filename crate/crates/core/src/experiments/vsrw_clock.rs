use serde::Serialize;

use super::{row, Experiment, ExperimentConfig, ParamSpec, Report, Series};
use crate::error::{Error, Result};
use crate::network::VertexMeasure;
use crate::resolvent::{resolvent_apply, MAX_JUMPS};
use crate::rng::{replicate, RandomSeed};
use crate::spaces::gasket_graph;
use crate::stats::{median_std_error, ratio_std_error, McEstimate, Quartiles};
use crate::walk::WalkKernel;

pub const MAX_LEVEL: u32 = 5;
const MEDIAN_BATCHES: usize = 20;

/// Rescaled corner-to-corner hitting times at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VsrwLevel {
    pub level: u32,
    pub quartiles: Quartiles,
    pub median_se: f64,
    /// Monte Carlo mean of `5^-n σ` with its standard error.
    pub mean: McEstimate,
    /// `5^-n E σ` from the Green kernel.
    pub exact_mean: f64,
    /// Median at this level over the median at the previous listed level.
    pub ratio: Option<f64>,
    pub ratio_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VsrwClockResult {
    pub levels: Vec<VsrwLevel>,
}

/// VSRW (`μ ≡ 1`, unit conductances) from corner 0 until it hits corner 1;
/// level `n` uses `seed.derive(n)`.
pub fn run_vsrw_clock(levels: &[u32], samples: usize, seed: RandomSeed) -> Result<VsrwClockResult> {
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let mut out: Vec<VsrwLevel> = Vec::new();
    for &level in levels {
        if level > MAX_LEVEL {
            return Err(Error::domain(format!("level {level} exceeds {MAX_LEVEL}")));
        }
        let g = gasket_graph(level)?;
        let (start, target) = (g.corners[0], g.corners[1]);
        let mu = VertexMeasure::vsrw(&g.net);
        let clock = 5f64.powi(level as i32);
        let kernel = WalkKernel::new(&g.net, &mu)?;
        let mut killed = vec![false; g.net.len()];
        killed[target] = true;
        let runs = replicate(samples, seed.derive(level as u64), |_, rng| {
            let mut t = 0.0;
            kernel
                .run_killed(start, &killed, MAX_JUMPS, rng, |_, dt| t += dt)
                .then_some(t / clock)
        });
        let total = runs.len();
        let times: Vec<f64> = runs.into_iter().flatten().collect();
        if times.is_empty() {
            return Err(Error::McBudget { aborted: total, total });
        }
        let mut mean = McEstimate::from_samples(&times);
        mean.aborted = total - times.len();
        let ones = vec![1.0; g.net.len()];
        let exact_mean = resolvent_apply(&g.net.resistance_matrix(), &mu, target, &ones, start)? / clock;
        let quartiles = Quartiles::of(&times);
        let median_se = median_std_error(&times, MEDIAN_BATCHES);
        let (ratio, ratio_se) = match out.last() {
            Some(prev) => (
                Some(quartiles.median / prev.quartiles.median),
                Some(ratio_std_error(
                    quartiles.median,
                    median_se,
                    prev.quartiles.median,
                    prev.median_se,
                )),
            ),
            None => (None, None),
        };
        out.push(VsrwLevel {
            level,
            quartiles,
            median_se,
            mean,
            exact_mean,
            ratio,
            ratio_se,
        });
    }
    Ok(VsrwClockResult { levels: out })
}

pub(super) struct VsrwClock;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { key: "levels", default: "0,1,2,3,4,5", help: "gasket levels (at most 5)" },
    ParamSpec { key: "samples", default: "10000", help: "hitting times per level" },
];

impl Experiment for VsrwClock {
    fn name(&self) -> &'static str {
        "vsrw-clock"
    }
    fn about(&self) -> &'static str {
        "5^n time scaling of VSRW corner-to-corner hitting times on the gasket"
    }
    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let res = run_vsrw_clock(&cfg.list("levels")?, cfg.get("samples")?, cfg.seed)?;
        let mut report = Report::new(
            self.name(),
            cfg,
            &[
                "level", "q1", "median", "median_se", "q3", "mean", "mean_se", "exact_mean",
                "z_score", "ratio", "ratio_se", "aborted",
            ],
        );
        for l in &res.levels {
            report.push_row(row![
                l.level,
                l.quartiles.q1,
                l.quartiles.median,
                l.median_se,
                l.quartiles.q3,
                l.mean.mean,
                l.mean.std_error,
                l.exact_mean,
                l.mean.z_score(l.exact_mean),
                l.ratio,
                l.ratio_se,
                l.mean.aborted
            ]);
        }
        report.series.push(Series {
            name: "median rescaled hitting time".into(),
            points: res.levels.iter().map(|l| (l.level as f64, l.quartiles.median)).collect(),
        });
        report.with_data(&res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_zero_mean_is_one() {
        // from a corner: rate 2, then the target or the third corner with
        // equal odds, so h = 1/2 + h/2 · 1/2 + ... gives h = 1
        let res = run_vsrw_clock(&[0], 20_000, RandomSeed(4)).unwrap();
        let l = res.levels[0];
        assert_close!(l.exact_mean, 1.0, 1e-12);
        assert!(l.mean.within(1.0, 4.0), "{l:?}");
        assert!(l.ratio.is_none());
    }

    #[test]
    fn mc_mean_matches_exact_at_level_two() {
        let res = run_vsrw_clock(&[1, 2], 4000, RandomSeed(5)).unwrap();
        for l in &res.levels {
            assert!(l.mean.within(l.exact_mean, 4.0), "{l:?}");
        }
        assert!(res.levels[1].ratio.unwrap() > 0.0);
    }
}
