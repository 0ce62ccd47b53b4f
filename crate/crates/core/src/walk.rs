//! Exact simulation of the continuous-time random walk with generator
//! `(Δf)(x) = μ(x)⁻¹ Σ_y c(x,y)(f(y) - f(x))`.
//!
//! The walk holds at `x` for an exponential time with rate `c(x)/μ(x)` and
//! then moves along the jump chain `P(x,y) = c(x,y)/c(x)`. The jump chain is
//! the same for every measure; the measure only sets the clock.

use nalgebra::DMatrix;
use rand::distributions::Open01;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::network::{Network, Vertex, VertexMeasure};
use crate::rng::{RandomSeed, Rng};

/// Transition matrix of the jump chain, `P(x, y) = c(x, y) / c(x)`.
///
/// The only vertex of a single-vertex network is absorbing.
pub fn jump_chain_matrix(net: &Network) -> DMatrix<f64> {
    let n = net.len();
    let mut p = DMatrix::zeros(n, n);
    if n == 1 {
        p[(0, 0)] = 1.0;
        return p;
    }
    for x in 0..n {
        let cx = net.weighted_degree(x);
        for &(y, c) in net.neighbors(x) {
            p[(x, y)] = c / cx;
        }
    }
    p
}

/// Precomputed holding rates and cumulative jump weights for fast stepping.
#[derive(Debug, Clone)]
pub struct WalkKernel<'a> {
    net: &'a Network,
    rates: Vec<f64>,
    cumulative: Vec<Vec<f64>>,
}

impl<'a> WalkKernel<'a> {
    pub fn new(net: &'a Network, mu: &VertexMeasure) -> Result<Self> {
        mu.check_network(net)?;
        let rates = (0..net.len())
            .map(|x| net.weighted_degree(x) / mu.weight(x))
            .collect();
        let cumulative = (0..net.len())
            .map(|x| {
                let mut acc = 0.0;
                net.neighbors(x)
                    .iter()
                    .map(|&(_, c)| {
                        acc += c;
                        acc
                    })
                    .collect()
            })
            .collect();
        Ok(WalkKernel {
            net,
            rates,
            cumulative,
        })
    }

    pub fn network(&self) -> &Network {
        self.net
    }

    /// Holding rate `c(x)/μ(x)`.
    pub fn rate(&self, x: Vertex) -> f64 {
        self.rates[x]
    }

    /// Exponential holding time at `x`, by inversion of an open-interval uniform.
    #[inline]
    pub fn holding_time(&self, x: Vertex, rng: &mut Rng) -> f64 {
        let u: f64 = rng.sample(Open01);
        -u.ln() / self.rates[x]
    }

    /// Next state drawn from the jump chain.
    #[inline]
    pub fn next_state(&self, x: Vertex, rng: &mut Rng) -> Vertex {
        let cum = &self.cumulative[x];
        let total = *cum.last().expect("vertex has no neighbours");
        let u: f64 = rng.gen::<f64>() * total;
        let i = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
        self.net.neighbors(x)[i].0
    }

    /// Runs the walk from `start` until it enters `killed` or makes
    /// `max_jumps` jumps, calling `visit(x, sojourn)` for every completed
    /// sojourn before killing. Returns `false` if the jump budget ran out.
    pub fn run_killed(
        &self,
        start: Vertex,
        killed: &[bool],
        max_jumps: u64,
        rng: &mut Rng,
        mut visit: impl FnMut(Vertex, f64),
    ) -> bool {
        let mut x = start;
        let mut jumps = 0;
        while !killed[x] {
            if jumps == max_jumps {
                return false;
            }
            visit(x, self.holding_time(x, rng));
            x = self.next_state(x, rng);
            jumps += 1;
        }
        true
    }

    /// Runs the walk from `start` up to time `horizon`, calling
    /// `visit(x, entry_time, exit_time)` for every sojourn (the last one is
    /// truncated at the horizon). `visit` may return `false` to stop early.
    pub fn run_until(
        &self,
        start: Vertex,
        horizon: f64,
        rng: &mut Rng,
        mut visit: impl FnMut(Vertex, f64, f64) -> bool,
    ) {
        let mut x = start;
        let mut t = 0.0;
        loop {
            let hold = if self.rates[x] > 0.0 {
                self.holding_time(x, rng)
            } else {
                f64::INFINITY
            };
            let exit = t + hold;
            if exit >= horizon {
                visit(x, t, horizon);
                return;
            }
            if !visit(x, t, exit) {
                return;
            }
            t = exit;
            x = self.next_state(x, rng);
        }
    }
}

/// A finite-horizon sample path.
///
/// The path is in `states[i]` on `[jump_times[i], jump_times[i+1])` and in
/// the last state from its jump time until [`Trajectory::end_time`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vertex>,
    pub jump_times: Vec<f64>,
    pub horizon: f64,
    /// Entry time into the stopping set, if the walk was stopped.
    pub stopped_at: Option<f64>,
}

impl Trajectory {
    /// Time at which recording ended: the stopping time, else the horizon.
    pub fn end_time(&self) -> f64 {
        self.stopped_at.unwrap_or(self.horizon)
    }

    /// State at time `t`; the last state is held after the end of the record.
    pub fn state_at(&self, t: f64) -> Vertex {
        let i = self.jump_times.partition_point(|&s| s <= t);
        self.states[i.saturating_sub(1)]
    }

    /// First time the path is in `set`, or `None` if it never is.
    pub fn hitting_time(&self, set: &[Vertex]) -> Result<Option<f64>> {
        if set.is_empty() {
            return Err(Error::domain("hitting set must be nonempty"));
        }
        Ok(self
            .states
            .iter()
            .position(|x| set.contains(x))
            .map(|i| self.jump_times[i]))
    }

    /// Local times `L_t(x)`: occupation time of `x` up to `t`, divided by `μ(x)`.
    pub fn local_times(&self, mu: &VertexMeasure, t: f64) -> Result<Vec<f64>> {
        if !(t >= 0.0) || t > self.horizon {
            return Err(Error::domain(format!(
                "local time requested at t = {t} outside [0, {}]",
                self.horizon
            )));
        }
        let n = mu.len();
        let mut occupation = vec![0.0; n];
        for (i, &x) in self.states.iter().enumerate() {
            if x >= n {
                return Err(Error::domain("measure does not cover the trajectory"));
            }
            let from = self.jump_times[i];
            if from >= t {
                break;
            }
            let to = self.jump_times.get(i + 1).copied().unwrap_or(t).min(t);
            occupation[x] += to - from;
        }
        Ok(occupation
            .iter()
            .enumerate()
            .map(|(x, &o)| o / mu.weight(x))
            .collect())
    }
}

/// Simulates the walk from `start` until `horizon` or the first entry into
/// `stop`, whichever comes first. A start inside `stop` yields a single
/// state of zero duration.
pub fn simulate(
    net: &Network,
    mu: &VertexMeasure,
    start: Vertex,
    horizon: f64,
    stop: Option<&[Vertex]>,
    seed: RandomSeed,
) -> Result<Trajectory> {
    net.check_vertex(start)?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!("horizon must be positive and finite, got {horizon}")));
    }
    let kernel = WalkKernel::new(net, mu)?;
    let mut stop_mask = vec![false; net.len()];
    for &v in stop.unwrap_or(&[]) {
        net.check_vertex(v)?;
        stop_mask[v] = true;
    }
    let mut rng = seed.rng();
    let mut traj = Trajectory {
        states: vec![start],
        jump_times: vec![0.0],
        horizon,
        stopped_at: None,
    };
    if stop_mask[start] {
        traj.stopped_at = Some(0.0);
        return Ok(traj);
    }
    let mut x = start;
    let mut t = 0.0;
    loop {
        if kernel.rate(x) == 0.0 {
            break;
        }
        t += kernel.holding_time(x, &mut rng);
        if t >= horizon {
            break;
        }
        x = kernel.next_state(x, &mut rng);
        traj.states.push(x);
        traj.jump_times.push(t);
        if stop_mask[x] {
            traj.stopped_at = Some(t);
            break;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::McEstimate;

    fn edge() -> Network {
        Network::unlabeled(2, &[(0, 1, 1.0)]).unwrap()
    }

    fn star() -> Network {
        Network::unlabeled(4, &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0)]).unwrap()
    }

    #[test]
    fn jump_chain_single_edge() {
        assert_eq!(
            jump_chain_matrix(&edge()),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
        );
    }

    #[test]
    fn jump_chain_star_center() {
        let p = jump_chain_matrix(&star());
        assert_close!(p[(0, 1)], 1.0 / 6.0, 1e-15);
        assert_close!(p[(0, 2)], 2.0 / 6.0, 1e-15);
        assert_close!(p[(0, 3)], 3.0 / 6.0, 1e-15);
        assert_eq!(p[(1, 0)], 1.0);
    }

    #[test]
    fn start_in_stop_set_is_immediate() {
        let traj = simulate(&edge(), &VertexMeasure::vsrw(&edge()), 0, 5.0, Some(&[0]), RandomSeed(1))
            .unwrap();
        assert_eq!(traj.states, vec![0]);
        assert_eq!(traj.stopped_at, Some(0.0));
        assert_eq!(traj.hitting_time(&[0]).unwrap(), Some(0.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let net = star();
        let mu = VertexMeasure::csrw(&net);
        let a = simulate(&net, &mu, 1, 50.0, None, RandomSeed(9)).unwrap();
        let b = simulate(&net, &mu, 1, 50.0, None, RandomSeed(9)).unwrap();
        let c = simulate(&net, &mu, 1, 50.0, None, RandomSeed(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn jump_times_strictly_increase_within_horizon() {
        let net = star();
        let traj = simulate(&net, &VertexMeasure::vsrw(&net), 0, 20.0, None, RandomSeed(3)).unwrap();
        assert_eq!(traj.jump_times[0], 0.0);
        assert!(traj.jump_times.windows(2).all(|w| w[0] < w[1]));
        assert!(*traj.jump_times.last().unwrap() <= 20.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let net = edge();
        let mu = VertexMeasure::vsrw(&net);
        assert!(simulate(&net, &mu, 5, 1.0, None, RandomSeed(0)).is_err());
        assert!(simulate(&net, &mu, 0, 0.0, None, RandomSeed(0)).is_err());
    }

    #[test]
    fn hitting_time_of_unvisited_set_is_none() {
        let traj = Trajectory {
            states: vec![0, 1, 0],
            jump_times: vec![0.0, 1.0, 2.0],
            horizon: 3.0,
            stopped_at: None,
        };
        assert_eq!(traj.hitting_time(&[2]).unwrap(), None);
        assert_eq!(traj.hitting_time(&[1]).unwrap(), Some(1.0));
        assert!(traj.hitting_time(&[]).is_err());
    }

    #[test]
    fn local_times_at_zero_and_normalization() {
        let net = star();
        let mu = VertexMeasure::new(vec![0.5, 1.0, 2.0, 4.0]).unwrap();
        let traj = simulate(&net, &mu, 2, 40.0, None, RandomSeed(5)).unwrap();
        assert!(traj.local_times(&mu, 0.0).unwrap().iter().all(|&l| l == 0.0));
        for t in [0.3, 7.0, 40.0] {
            let lt = traj.local_times(&mu, t).unwrap();
            let total: f64 = lt.iter().zip(mu.weights()).map(|(l, m)| l * m).sum();
            assert_close!(total, t, 1e-12 * t);
        }
        assert!(traj.local_times(&mu, 41.0).is_err());
    }

    #[test]
    fn two_vertex_holding_time_has_unit_mean() {
        let net = edge();
        let mu = VertexMeasure::vsrw(&net);
        let samples = crate::rng::replicate(100_000, RandomSeed(42), |_, rng| {
            WalkKernel::new(&net, &mu).unwrap().holding_time(0, rng)
        });
        let est = McEstimate::from_samples(&samples);
        assert!(est.within(1.0, 3.0), "{est:?}");
    }

    #[test]
    fn two_vertex_hitting_time_has_unit_mean() {
        let net = edge();
        let mu = VertexMeasure::vsrw(&net);
        let samples: Vec<f64> = (0..100_000u64)
            .map(|i| {
                let traj = simulate(&net, &mu, 0, 1e3, Some(&[1]), RandomSeed(17).derive(i)).unwrap();
                traj.hitting_time(&[1]).unwrap().unwrap()
            })
            .collect();
        let est = McEstimate::from_samples(&samples);
        assert!(est.within(1.0, 3.0), "{est:?}");
    }

    #[test]
    fn csrw_holds_at_unit_rate() {
        let net = star();
        let kernel = WalkKernel::new(&net, &VertexMeasure::csrw(&net)).unwrap();
        for x in 0..4 {
            assert_eq!(kernel.rate(x), 1.0);
        }
    }
}
