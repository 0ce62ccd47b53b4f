// Independent reference computations shared by the integration tests.
// Nothing here calls into the library's solvers.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng as _;
use resnet::rng::Rng;
use resnet::spaces::{random_network, FiniteMMSpace};
use resnet::{Network, RandomSeed, VertexMeasure};

pub fn laplacian(net: &Network) -> DMatrix<f64> {
    let n = net.len();
    let mut l = DMatrix::zeros(n, n);
    for e in net.edges() {
        l[(e.u, e.v)] -= e.conductance;
        l[(e.v, e.u)] -= e.conductance;
        l[(e.u, e.u)] += e.conductance;
        l[(e.v, e.v)] += e.conductance;
    }
    l
}

/// `R(x, y) = L⁺_xx + L⁺_yy - 2 L⁺_xy` from the SVD pseudoinverse.
pub fn pinv_resistance(net: &Network) -> DMatrix<f64> {
    let n = net.len();
    let p = laplacian(net).pseudo_inverse(1e-12).unwrap();
    DMatrix::from_fn(n, n, |x, y| {
        if x == y {
            0.0
        } else {
            p[(x, x)] + p[(y, y)] - 2.0 * p[(x, y)]
        }
    })
}

/// Green matrix of the walk killed on `set`: the inverse of the Laplacian
/// with the rows and columns of `set` removed, padded with zeros.
pub fn grounded_green(net: &Network, set: &[usize]) -> DMatrix<f64> {
    let n = net.len();
    let keep: Vec<usize> = (0..n).filter(|v| !set.contains(v)).collect();
    let l = laplacian(net);
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| l[(keep[i], keep[j])]);
    let inv = sub.try_inverse().unwrap();
    let mut g = DMatrix::zeros(n, n);
    for (i, &a) in keep.iter().enumerate() {
        for (j, &b) in keep.iter().enumerate() {
            g[(a, b)] = inv[(i, j)];
        }
    }
    g
}

pub fn net_from_seed(n: usize, extra: f64, c_min: f64, c_max: f64, seed: u64) -> Network {
    random_network(n, extra, c_min, c_max, &mut RandomSeed(seed).rng()).unwrap()
}

pub fn random_measure(n: usize, rng: &mut Rng) -> VertexMeasure {
    VertexMeasure::new((0..n).map(|_| rng.gen_range(0.1..3.0)).collect()).unwrap()
}

/// A random finite metric space: shortest paths of random positive weights
/// on a complete graph, which always satisfy the triangle inequality.
pub fn random_space(n: usize, total_mass: f64, rng: &mut Rng) -> FiniteMMSpace {
    let mut d = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { f64::INFINITY });
    for i in 0..n {
        for j in 0..i {
            let w = rng.gen_range(0.1..2.0);
            d[(i, j)] = w;
            d[(j, i)] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[(i, k)] + d[(k, j)];
                if via < d[(i, j)] {
                    d[(i, j)] = via;
                }
            }
        }
    }
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
    let s: f64 = w.iter().sum();
    let measure = w.iter().map(|x| x * total_mass / s).collect();
    FiniteMMSpace::unlabeled(d, measure, 0).unwrap()
}

/// Prohorov distance straight from the definition, with closed
/// neighbourhoods, scanning every candidate level.
pub fn brute_prohorov(space: &FiniteMMSpace, mu: &[f64], nu: &[f64]) -> f64 {
    let n = space.len();
    let mass = |m: &[f64], set: u32| (0..n).filter(|i| set >> i & 1 == 1).map(|i| m[i]).sum::<f64>();
    let blow = |set: u32, eps: f64| {
        (0..n)
            .filter(|&y| (0..n).any(|x| set >> x & 1 == 1 && space.dist(x, y) <= eps))
            .fold(0u32, |acc, y| acc | 1 << y)
    };
    let feasible = |eps: f64| {
        (1..1u32 << n).all(|a| {
            mass(mu, a) <= mass(nu, blow(a, eps)) + eps + 1e-12
                && mass(nu, a) <= mass(mu, blow(a, eps)) + eps + 1e-12
        })
    };
    let mut candidates = vec![0.0, 1.0];
    let mut levels: Vec<f64> = vec![0.0];
    for i in 0..n {
        for j in 0..n {
            levels.push(space.dist(i, j));
        }
    }
    for &r in &levels {
        candidates.push(r);
        for a in 1..1u32 << n {
            let b = blow(a, r);
            candidates.push(mass(mu, a) - mass(nu, b));
            candidates.push(mass(nu, a) - mass(mu, b));
        }
    }
    candidates
        .into_iter()
        .filter(|&c| c >= 0.0 && feasible(c))
        .fold(f64::INFINITY, f64::min)
}

/// Largest flow between the marginals along `pairs`, via the min-cut
/// formula `min_S μ1(X1 \ S) + μ2(N(S))`.
fn max_flow_by_cut(m1: &[f64], m2: &[f64], pairs: &[(usize, usize)]) -> f64 {
    let n1 = m1.len();
    (0..1u32 << n1)
        .map(|s| {
            let outside: f64 = (0..n1).filter(|i| s >> i & 1 == 0).map(|i| m1[i]).sum();
            let mut nbr = vec![false; m2.len()];
            for &(i, j) in pairs {
                if s >> i & 1 == 1 {
                    nbr[j] = true;
                }
            }
            outside + (0..m2.len()).filter(|&j| nbr[j]).map(|j| m2[j]).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Rooted surrogate GHP by enumerating every total relation containing the
/// root pair.
pub fn brute_ghp(a: &FiniteMMSpace, b: &FiniteMMSpace) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    let all: Vec<(usize, usize)> = (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect();
    let root = all.iter().position(|&p| p == (a.root(), b.root())).unwrap();
    let others: Vec<usize> = (0..all.len()).filter(|&k| k != root).collect();
    let big = a.total_mass().max(b.total_mass());
    let mut best = f64::INFINITY;
    for mask in 0..1u64 << others.len() {
        let mut pairs = vec![all[root]];
        pairs.extend(others.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| all[p]));
        let total = (0..n1).all(|i| pairs.iter().any(|p| p.0 == i)) && (0..n2).all(|j| pairs.iter().any(|p| p.1 == j));
        if !total {
            continue;
        }
        let mut dis: f64 = 0.0;
        for &(i, j) in &pairs {
            for &(k, l) in &pairs {
                dis = dis.max((a.dist(i, k) - b.dist(j, l)).abs());
            }
        }
        let defect = big - max_flow_by_cut(a.measure(), b.measure(), &pairs);
        best = best.min((dis / 2.0).max(defect));
    }
    best
}

/// Smallest number of open `eps`-balls centred at points covering the space.
pub fn brute_cover(space: &FiniteMMSpace, eps: f64) -> usize {
    let n = space.len();
    let full = (1u32 << n) - 1;
    let balls: Vec<u32> = (0..n)
        .map(|c| (0..n).filter(|&y| space.dist(c, y) < eps).fold(0, |m, y| m | 1 << y))
        .collect();
    (1..=full)
        .filter(|s| balls.iter().enumerate().filter(|(c, _)| s >> c & 1 == 1).fold(0, |m, (_, b)| m | b) == full)
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}
