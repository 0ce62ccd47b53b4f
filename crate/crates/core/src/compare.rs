//! Distances between finite metric-measure spaces, covering numbers, and
//! the exit-time estimate for walks on resistance spaces.
//!
//! Everything here is brute force: these routines are verification oracles
//! for small instances, and every exponential search has a hard size cap
//! that surfaces as [`Error::Capacity`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, ResistanceMatrix, Vertex, VertexMeasure};
use crate::rng::{replicate, RandomSeed};
use crate::spaces::FiniteMMSpace;
use crate::stats::McEstimate;
use crate::walk::WalkKernel;

/// Largest space [`prohorov_distance`] will enumerate subsets of.
pub const PROHOROV_MAX_POINTS: usize = 20;
/// Largest combined size accepted by [`ghp_distance`].
pub const GHP_MAX_POINTS: usize = 14;
/// Above this size [`covering_number`] returns the greedy cover, unverified.
pub const COVER_EXACT_MAX_POINTS: usize = 20;
/// Number of log-spaced radii tried by [`best_exit_time_bound`].
pub const DELTA_GRID: usize = 20;

fn check_points(space: &FiniteMMSpace, set: &[usize], name: &str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::domain(format!("{name} must be nonempty")));
    }
    if let Some(&p) = set.iter().find(|&&p| p >= space.len()) {
        return Err(Error::domain(format!("{name} contains point {p} outside the space")));
    }
    Ok(())
}

/// Hausdorff distance between two nonempty point sets of one space.
pub fn hausdorff_distance(space: &FiniteMMSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    check_points(space, a, "A")?;
    check_points(space, b, "B")?;
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&x| to.iter().map(|&y| space.dist(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

fn check_weights(space: &FiniteMMSpace, w: &[f64], name: &str) -> Result<()> {
    if w.len() != space.len() {
        return Err(Error::domain(format!(
            "{name} has {} weights for {} points",
            w.len(),
            space.len()
        )));
    }
    if w.iter().any(|&m| !(m >= 0.0 && m.is_finite())) {
        return Err(Error::domain(format!("{name} must be nonnegative")));
    }
    Ok(())
}

/// Sorted distinct values of the metric, starting with 0.
fn distance_levels(space: &FiniteMMSpace) -> Vec<f64> {
    let n = space.len();
    let mut d: Vec<f64> = std::iter::once(0.0)
        .chain((0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| space.dist(i, j)))
        .collect();
    d.sort_by(|a, b| a.total_cmp(b));
    d.dedup();
    d
}

/// Subset sums of a weight vector by splitting the bitmask in two halves.
struct MaskSum {
    low: Vec<f64>,
    high: Vec<f64>,
    shift: usize,
}

impl MaskSum {
    fn new(w: &[f64]) -> Self {
        let shift = w.len() / 2;
        let table = |ws: &[f64]| {
            let mut t = vec![0.0; 1 << ws.len()];
            for m in 1..t.len() {
                let b = m.trailing_zeros() as usize;
                t[m] = t[m & (m - 1)] + ws[b];
            }
            t
        };
        MaskSum {
            low: table(&w[..shift]),
            high: table(&w[shift..]),
            shift,
        }
    }

    fn sum(&self, mask: u32) -> f64 {
        self.low[(mask & ((1u32 << self.shift) - 1)) as usize] + self.high[(mask >> self.shift) as usize]
    }
}

/// `max_A μ(A) - ν(A^r)` over all subsets, with closed neighbourhoods.
fn max_defect(space: &FiniteMMSpace, mu: &MaskSum, nu: &MaskSum, r: f64) -> f64 {
    let n = space.len();
    let nbhd: Vec<u32> = (0..n)
        .map(|i| (0..n).filter(|&j| space.dist(i, j) <= r).fold(0, |m, j| m | (1 << j)))
        .collect();
    let mut grown = vec![0u32; 1 << n];
    let mut worst = 0.0f64;
    for a in 1..(1u32 << n) {
        let b = a.trailing_zeros() as usize;
        grown[a as usize] = grown[(a & (a - 1)) as usize] | nbhd[b];
        worst = worst.max(mu.sum(a) - nu.sum(grown[a as usize]));
    }
    worst
}

/// Prohorov distance between two measures on the same finite space.
///
/// With closed neighbourhoods the worst subset defect `v(r)` is a
/// nonincreasing step function jumping only at distances `d_k`, so the
/// distance is `min_k max(d_k, v(d_k))`; the crossing is found by bisection.
pub fn prohorov_distance(space: &FiniteMMSpace, mu: &[f64], nu: &[f64]) -> Result<f64> {
    check_weights(space, mu, "mu")?;
    check_weights(space, nu, "nu")?;
    if space.len() > PROHOROV_MAX_POINTS {
        return Err(Error::Capacity {
            what: "prohorov subset enumeration",
            size: space.len(),
            limit: PROHOROV_MAX_POINTS,
        });
    }
    let (ms, ns) = (MaskSum::new(mu), MaskSum::new(nu));
    let levels = distance_levels(space);
    let defect = |r: f64| max_defect(space, &ms, &ns, r).max(max_defect(space, &ns, &ms, r));
    // first level where the defect drops to the radius
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    let mut at_hi = defect(levels[hi]);
    if at_hi > levels[hi] {
        return Ok(at_hi);
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        let v = defect(levels[mid]);
        if v <= levels[mid] {
            hi = mid;
            at_hi = v;
        } else {
            lo = mid + 1;
        }
    }
    let mut best = levels[hi].max(at_hi);
    if hi > 0 {
        best = best.min(defect(levels[hi - 1]).max(levels[hi - 1]));
    }
    Ok(best)
}

/// A relation between two point sets that is total on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(usize, usize)>, n1: usize, n2: usize) -> Result<Self> {
        let mut left = vec![false; n1];
        let mut right = vec![false; n2];
        for &(a, b) in &pairs {
            if a >= n1 || b >= n2 {
                return Err(Error::domain("pair outside the point sets"));
            }
            left[a] = true;
            right[b] = true;
        }
        if left.contains(&false) || right.contains(&false) {
            return Err(Error::domain("relation is not total on both sides"));
        }
        Ok(Correspondence { pairs })
    }

    /// `max |d1(a, a') - d2(b, b')|` over pairs of pairs.
    pub fn distortion(&self, s1: &FiniteMMSpace, s2: &FiniteMMSpace) -> f64 {
        let mut worst = 0.0f64;
        for &(a, b) in &self.pairs {
            for &(a2, b2) in &self.pairs {
                worst = worst.max((s1.dist(a, a2) - s2.dist(b, b2)).abs());
            }
        }
        worst
    }

    /// Mass left uncoupled by the best transport plan supported on the
    /// relation: `max(|μ1|, |μ2|) - maxflow`.
    pub fn transport_defect(&self, s1: &FiniteMMSpace, s2: &FiniteMMSpace) -> f64 {
        let flow = max_flow_on(&self.pairs, s1.measure(), s2.measure());
        (s1.total_mass().max(s2.total_mass()) - flow).max(0.0)
    }
}

/// Maximum flow source → left (cap μ1) → right along `pairs` → sink (cap
/// μ2), by augmenting paths on the residual network.
fn max_flow_on(pairs: &[(usize, usize)], m1: &[f64], m2: &[f64]) -> f64 {
    let (n1, n2) = (m1.len(), m2.len());
    let size = n1 + n2 + 2;
    let (src, sink) = (n1 + n2, n1 + n2 + 1);
    let mut cap = vec![vec![0.0f64; size]; size];
    for i in 0..n1 {
        cap[src][i] = m1[i];
    }
    for j in 0..n2 {
        cap[n1 + j][sink] = m2[j];
    }
    for &(a, b) in pairs {
        cap[a][n1 + b] = f64::INFINITY;
    }
    let mut total = 0.0;
    loop {
        let mut prev = vec![usize::MAX; size];
        prev[src] = src;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for v in 0..size {
                if prev[v] == usize::MAX && cap[u][v] > 1e-15 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return total;
        }
        let mut push = f64::INFINITY;
        let mut v = sink;
        while v != src {
            push = push.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = sink;
        while v != src {
            let u = prev[v];
            cap[u][v] -= push;
            cap[v][u] += push;
            v = u;
        }
        total += push;
    }
}

/// Outcome of [`ghp_distance`] with the optimal correspondence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhpResult {
    pub distance: f64,
    pub distortion: f64,
    pub transport_defect: f64,
    pub correspondence: Correspondence,
}

/// Marked Gromov-Hausdorff-Prohorov surrogate between small spaces.
///
/// Minimizes `max(dis(C)/2, T(C))` over correspondences `C` containing the
/// root pair, where `T` is the uncoupled mass of the best plan supported on
/// `C`. It vanishes exactly on root- and measure-preserving isometries.
pub fn ghp_distance(s1: &FiniteMMSpace, s2: &FiniteMMSpace) -> Result<f64> {
    ghp_distance_detailed(s1, s2).map(|r| r.distance)
}

pub fn ghp_distance_detailed(s1: &FiniteMMSpace, s2: &FiniteMMSpace) -> Result<GhpResult> {
    let (n1, n2) = (s1.len(), s2.len());
    if n1 + n2 > GHP_MAX_POINTS {
        return Err(Error::Capacity {
            what: "ghp correspondence enumeration",
            size: n1 + n2,
            limit: GHP_MAX_POINTS,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n1).flat_map(|a| (0..n2).map(move |b| (a, b))).collect();
    let np = pairs.len();
    let gap = |p: usize, q: usize| {
        let ((a, b), (a2, b2)) = (pairs[p], pairs[q]);
        (s1.dist(a, a2) - s2.dist(b, b2)).abs()
    };
    let mut thresholds: Vec<f64> = (0..np)
        .flat_map(|p| (p..np).map(move |q| (p, q)))
        .map(|(p, q)| gap(p, q))
        .collect();
    thresholds.sort_by(|a, b| a.total_cmp(b));
    thresholds.dedup();
    let root = s1.root() * n2 + s2.root();

    // best correspondence among those with distortion ≤ r
    let best_at = |r: f64| -> Option<(f64, Correspondence)> {
        let adj: Vec<u64> = (0..np)
            .map(|p| (0..np).filter(|&q| q != p && gap(p, q) <= r).fold(0u64, |m, q| m | (1 << q)))
            .collect();
        if (0..np).any(|p| gap(p, p) > r) {
            return None;
        }
        let mut best: Option<(f64, Correspondence)> = None;
        let mut visit = |clique: u64| {
            let chosen: Vec<(usize, usize)> =
                (0..np).filter(|&p| clique >> p & 1 == 1).map(|p| pairs[p]).collect();
            if let Ok(c) = Correspondence::new(chosen, n1, n2) {
                let t = c.transport_defect(s1, s2);
                if best.as_ref().map_or(true, |(bt, _)| t < *bt) {
                    best = Some((t, c));
                }
            }
        };
        bron_kerbosch(&adj, 1 << root, adj[root], 0, &mut visit);
        best
    };

    // T at threshold r is nonincreasing and r/2 increasing: bisect for the crossing
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    let mut candidates = Vec::new();
    while lo < hi {
        let mid = (lo + hi) / 2;
        match best_at(thresholds[mid]) {
            Some((t, c)) if t <= thresholds[mid] / 2.0 => {
                candidates.push((thresholds[mid], t, c));
                hi = mid;
            }
            Some((t, c)) => {
                candidates.push((thresholds[mid], t, c));
                lo = mid + 1;
            }
            None => lo = mid + 1,
        }
    }
    for k in [hi.saturating_sub(1), hi] {
        if let Some((t, c)) = best_at(thresholds[k]) {
            candidates.push((thresholds[k], t, c));
        }
    }
    let (_, t, c) = candidates
        .into_iter()
        .min_by(|x, y| (x.0 / 2.0).max(x.1).total_cmp(&(y.0 / 2.0).max(y.1)))
        .expect("the full relation is always a correspondence");
    let distortion = c.distortion(s1, s2);
    Ok(GhpResult {
        distance: (distortion / 2.0).max(t),
        distortion,
        transport_defect: t,
        correspondence: c,
    })
}

/// Enumerates maximal cliques extending `r` (Bron–Kerbosch with pivoting).
fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, visit: &mut impl FnMut(u64)) {
    if p == 0 {
        if x == 0 {
            visit(r);
        }
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut rest = p & !adj[pivot];
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        let bit = 1u64 << v;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], visit);
        p &= !bit;
        x |= bit;
        rest &= !bit;
    }
}

/// A cover size and whether it is certified minimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub count: usize,
    pub exact: bool,
}

/// Minimal number of open balls `{d < ε}` centred at points that cover the
/// space.
pub fn covering_number(space: &FiniteMMSpace, eps: f64) -> Result<CoverResult> {
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    let n = space.len();
    let balls: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| space.dist(i, j) < eps).collect())
        .collect();
    let mut covered = vec![false; n];
    let mut left = n;
    let mut greedy = 0;
    while left > 0 {
        let gain = |i: usize| (0..n).filter(|&j| balls[i][j] && !covered[j]).count();
        let best = (0..n).max_by_key(|&i| (gain(i), std::cmp::Reverse(i))).unwrap();
        for j in 0..n {
            if balls[best][j] && !covered[j] {
                covered[j] = true;
                left -= 1;
            }
        }
        greedy += 1;
    }
    if n > COVER_EXACT_MAX_POINTS {
        return Ok(CoverResult { count: greedy, exact: false });
    }
    let masks: Vec<u32> = balls
        .iter()
        .map(|b| (0..n).filter(|&j| b[j]).fold(0, |m, j| m | (1 << j)))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    for k in 1..greedy {
        if covers_with(&masks, full, k, 0) {
            return Ok(CoverResult { count: k, exact: true });
        }
    }
    Ok(CoverResult { count: greedy, exact: true })
}

fn covers_with(masks: &[u32], full: u32, k: usize, acc: u32) -> bool {
    if acc == full {
        return true;
    }
    if k == 0 {
        return false;
    }
    // the lowest uncovered point must be covered by some chosen ball
    let need = (!acc & full).trailing_zeros();
    masks
        .iter()
        .any(|&m| m >> need & 1 == 1 && covers_with(masks, full, k - 1, acc | m))
}

/// `min_x μ({y : d(x, y) < δ})`.
pub fn min_ball_measure(space: &FiniteMMSpace, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain("delta must be positive"));
    }
    let n = space.len();
    Ok((0..n)
        .map(|x| (0..n).filter(|&y| space.dist(x, y) < delta).map(|y| space.measure()[y]).sum::<f64>())
        .fold(f64::INFINITY, f64::min))
}

/// `32 N(ε/4) / ε · (δ + t / min_x μ(B(x, δ)))`.
pub fn exit_time_bound(space: &FiniteMMSpace, eps: f64, delta: f64, t: f64) -> Result<f64> {
    if !(eps > 0.0 && delta > 0.0 && t >= 0.0) {
        return Err(Error::domain("eps and delta must be positive and t nonnegative"));
    }
    let cover = covering_number(space, eps / 4.0)?;
    let ball = min_ball_measure(space, delta)?;
    Ok(32.0 * cover.count as f64 / eps * (delta + t / ball))
}

/// The bound minimized over [`DELTA_GRID`] radii log-spaced between
/// `10^-4·diam` and `2·diam`; returns `(δ, bound)`.
pub fn best_exit_time_bound(space: &FiniteMMSpace, eps: f64, t: f64) -> Result<(f64, f64)> {
    let diam = space.diameter();
    let top = if diam > 0.0 { 2.0 * diam } else { eps };
    let bottom = top * 5e-5;
    let ratio = (top / bottom).ln() / (DELTA_GRID - 1) as f64;
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 0..DELTA_GRID {
        let delta = bottom * (ratio * i as f64).exp();
        let b = exit_time_bound(space, eps, delta, t)?;
        if b < best.1 {
            best = (delta, b);
        }
    }
    Ok(best)
}

/// Per-start exceedance estimates of `P_x(sup_{s≤t} R(x, X_s) ≥ ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitProbability {
    pub per_start: Vec<McEstimate>,
    /// Start vertex achieving the largest estimate (first on ties).
    pub argmax: Vertex,
}

impl ExitProbability {
    pub fn sup(&self) -> McEstimate {
        self.per_start[self.argmax]
    }
}

/// Monte Carlo estimate of the exit probability from every start vertex.
///
/// Start `x` uses the stream family `seed.derive(x)`.
pub fn mc_exit_prob(
    net: &Network,
    mu: &VertexMeasure,
    r: &ResistanceMatrix,
    eps: f64,
    t: f64,
    n: usize,
    seed: RandomSeed,
) -> Result<ExitProbability> {
    if n == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    if !(eps > 0.0 && t >= 0.0 && t.is_finite()) {
        return Err(Error::domain("eps must be positive and t finite and nonnegative"));
    }
    if r.len() != net.len() {
        return Err(Error::domain("resistance matrix does not match the network"));
    }
    let kernel = WalkKernel::new(net, mu)?;
    let per_start: Vec<McEstimate> = (0..net.len())
        .map(|x| {
            let hits = replicate(n, seed.derive(x as u64), |_, rng| {
                let mut exceeded = false;
                kernel.run_until(x, t, rng, |v, _, _| {
                    exceeded = r.get(x, v) >= eps;
                    !exceeded
                });
                if exceeded {
                    1.0
                } else {
                    0.0
                }
            });
            McEstimate::from_samples(&hits)
        })
        .collect();
    let argmax = (0..per_start.len())
        .fold(0, |b, i| if per_start[i].mean > per_start[b].mean { i } else { b });
    Ok(ExitProbability { per_start, argmax })
}

/// JSON shape of an exit-bound comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitBoundReport {
    pub eps: f64,
    pub delta: f64,
    pub t: f64,
    pub bound: f64,
    pub mc_sup: f64,
    pub mc_se: f64,
    pub per_start: Vec<McEstimate>,
}

/// Runs [`mc_exit_prob`] and [`best_exit_time_bound`] on `(V, R, μ)`.
pub fn exit_bound_report(
    net: &Network,
    mu: &VertexMeasure,
    eps: f64,
    t: f64,
    n: usize,
    seed: RandomSeed,
) -> Result<ExitBoundReport> {
    let r = net.resistance_matrix();
    let space = FiniteMMSpace::new(
        net.labels().to_vec(),
        r.matrix().clone(),
        mu.weights().to_vec(),
        0,
    )?;
    let (delta, bound) = best_exit_time_bound(&space, eps, t)?;
    let mc = mc_exit_prob(net, mu, &r, eps, t, n, seed)?;
    let sup = mc.sup();
    Ok(ExitBoundReport {
        eps,
        delta,
        t,
        bound,
        mc_sup: sup.mean,
        mc_se: sup.std_error,
        per_start: mc.per_start,
    })
}
