use rand::distributions::Open01;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::rng::{RandomSeed, Rng};

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Edges of `G(n, p)` by geometric skipping over the pairs `w < v`.
fn gnp_edges(n: usize, p: f64, rng: &mut Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((w, v));
            }
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let u: f64 = rng.sample(Open01);
        let skip = (u.ln() / log_q).floor();
        // a skip past every remaining pair ends the scan
        if skip >= (n * n) as f64 {
            break;
        }
        w += 1 + skip as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    edges
}

/// Largest connected component of the Erdős–Rényi graph `G(n, p)` with unit
/// conductances. Ties go to the component containing the smallest vertex
/// label; vertices keep their original labels in increasing order.
pub fn er_giant_component(n: usize, p: f64, seed: RandomSeed) -> Result<Network> {
    if n < 2 {
        return Err(Error::domain("need at least two vertices"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!("edge probability {p} outside (0, 1]")));
    }
    let mut rng = seed.rng();
    let edges = gnp_edges(n, p, &mut rng);
    let mut uf = UnionFind::new(n);
    for &(a, b) in &edges {
        uf.union(a, b);
    }
    // scanning vertices in order makes the first root seen at each size the
    // one holding the smallest label
    let mut best_root = uf.find(0);
    let mut best_size = uf.size[best_root];
    for v in 1..n {
        let r = uf.find(v);
        if uf.size[r] > best_size {
            best_root = r;
            best_size = uf.size[r];
        }
    }
    let mut new_index = vec![usize::MAX; n];
    let mut labels = Vec::with_capacity(best_size);
    for v in 0..n {
        if uf.find(v) == best_root {
            new_index[v] = labels.len();
            labels.push(v.to_string());
        }
    }
    let comp_edges: Vec<_> = edges
        .iter()
        .filter(|&&(a, _)| new_index[a] != usize::MAX)
        .map(|&(a, b)| (new_index[a], new_index[b], 1.0))
        .collect();
    Network::new(labels, &comp_edges)
}

/// One Pareto draw `U^(-1/α)`, so that `P(c ≥ u) = u^-α` for `u ≥ 1`.
pub fn sample_pareto(alpha: f64, rng: &mut Rng) -> f64 {
    let u: f64 = rng.sample(Open01);
    u.powf(-1.0 / alpha)
}

/// Replaces every conductance by an independent Pareto(α) draw, in
/// canonical edge order.
pub fn heavy_tailed_conductances(net: &Network, alpha: f64, seed: RandomSeed) -> Result<Network> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (0, 1)")));
    }
    let mut rng = seed.rng();
    net.map_conductances(|_| sample_pareto(alpha, &mut rng))
}

/// A random connected network on `n` vertices: a random recursive spanning
/// tree plus each remaining pair with probability `extra`, conductances
/// log-uniform on `[c_min, c_max]`.
pub fn random_network(
    n: usize,
    extra: f64,
    c_min: f64,
    c_max: f64,
    rng: &mut Rng,
) -> Result<Network> {
    if n == 0 {
        return Err(Error::domain("need at least one vertex"));
    }
    if !(0.0..=1.0).contains(&extra) {
        return Err(Error::domain("extra-edge probability outside [0, 1]"));
    }
    if !(c_min > 0.0 && c_min <= c_max && c_max.is_finite()) {
        return Err(Error::domain("conductance range must satisfy 0 < min <= max"));
    }
    let (lo, hi) = (c_min.ln(), c_max.ln());
    let draw = |rng: &mut Rng| (lo + (hi - lo) * rng.gen::<f64>()).exp();
    let mut edges = Vec::new();
    let mut in_tree = vec![false; n * n];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        in_tree[u * n + v] = true;
        edges.push((u, v, draw(rng)));
    }
    for v in 1..n {
        for u in 0..v {
            if !in_tree[u * n + v] && rng.gen::<f64>() < extra {
                edges.push((u, v, draw(rng)));
            }
        }
    }
    Network::unlabeled(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::McEstimate;

    #[test]
    fn full_probability_gives_complete_graph() {
        let net = er_giant_component(12, 1.0, RandomSeed(0)).unwrap();
        assert_eq!(net.len(), 12);
        assert_eq!(net.edges().len(), 66);
    }

    #[test]
    fn tiny_probability_gives_tiny_component() {
        let net = er_giant_component(100, 1e-6, RandomSeed(3)).unwrap();
        assert!(net.len() <= 2);
        assert_eq!(net.label(0), "0");
    }

    #[test]
    fn skipping_matches_edge_density() {
        let mut rng = RandomSeed(4).rng();
        let n = 2000;
        let p = 0.01;
        let m = gnp_edges(n, p, &mut rng).len() as f64;
        let pairs = (n * (n - 1) / 2) as f64;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        assert!((m - pairs * p).abs() < 5.0 * sd, "{m}");
    }

    #[test]
    fn skipping_yields_valid_pairs() {
        let mut rng = RandomSeed(8).rng();
        let edges = gnp_edges(300, 0.05, &mut rng);
        assert!(edges.iter().all(|&(w, v)| w < v && v < 300));
        let mut sorted = edges.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), edges.len());
    }

    #[test]
    fn pareto_tail_and_median() {
        let alpha = 0.5;
        let mut rng = RandomSeed(10).rng();
        let draws: Vec<f64> = (0..100_000).map(|_| sample_pareto(alpha, &mut rng)).collect();
        assert!(draws.iter().all(|&c| c >= 1.0));
        let exceed: Vec<f64> = draws.iter().map(|&c| if c >= 2.0 { 1.0 } else { 0.0 }).collect();
        let est = McEstimate::from_samples(&exceed);
        assert!(est.within(2f64.powf(-alpha), 4.0), "{est:?}");
        let mut sorted = draws.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let median = sorted[sorted.len() / 2];
        assert!((median - 4.0).abs() < 0.4, "{median}");
    }

    #[test]
    fn random_networks_are_connected_and_in_range() {
        let mut rng = RandomSeed(12).rng();
        for n in 1..15 {
            let net = random_network(n, 0.3, 1e-3, 1e3, &mut rng).unwrap();
            assert_eq!(net.len(), n);
            assert!(net.edges().len() >= n - 1);
            assert!(net.edges().iter().all(|e| (1e-3..=1e3).contains(&e.conductance)));
        }
    }

    #[test]
    fn decoration_is_seeded() {
        let net = super::super::path_graph(20, 1.0).unwrap();
        let a = heavy_tailed_conductances(&net, 0.5, RandomSeed(1)).unwrap();
        let b = heavy_tailed_conductances(&net, 0.5, RandomSeed(1)).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert!(a.edges().iter().all(|e| e.conductance >= 1.0));
        assert!(heavy_tailed_conductances(&net, 1.0, RandomSeed(1)).is_err());
    }
}
