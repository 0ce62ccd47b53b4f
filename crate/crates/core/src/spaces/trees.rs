//! Critical Galton-Watson trees conditioned on their size.
//!
//! A tree with `n` vertices is encoded by its preorder offspring sequence
//! `ξ_1, ..., ξ_n`, which sums to `n - 1`. Sampling `n` i.i.d. offspring
//! counts, rejecting until the sum is `n - 1`, and rotating the sequence to
//! start just after the first minimum of its Łukasiewicz walk (cycle lemma)
//! gives an exact draw from the conditioned law.

use rand::distributions::Open01;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::network::{Network, Vertex};
use crate::rng::{RandomSeed, Rng};

/// Rejection budget for [`gw_tree`].
pub const MAX_ATTEMPTS: u64 = 10_000_000;

/// An offspring distribution on `{0, 1, 2, ...}`.
pub trait OffspringLaw: Send + Sync {
    fn name(&self) -> String;
    fn pmf(&self, k: usize) -> f64;
    fn mean(&self) -> f64;
    fn sample(&self, rng: &mut Rng) -> usize;
}

/// `P(k) = 2^-(k+1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GeometricHalf;

impl OffspringLaw for GeometricHalf {
    fn name(&self) -> String {
        "geometric".into()
    }
    fn pmf(&self, k: usize) -> f64 {
        0.5f64.powi(k as i32 + 1)
    }
    fn mean(&self) -> f64 {
        1.0
    }
    fn sample(&self, rng: &mut Rng) -> usize {
        let u: f64 = rng.sample(Open01);
        (-u.log2()).floor() as usize
    }
}

/// Poisson with mean one.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoissonOne;

impl OffspringLaw for PoissonOne {
    fn name(&self) -> String {
        "poisson".into()
    }
    fn pmf(&self, k: usize) -> f64 {
        let log_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
        (-1.0 - log_fact).exp()
    }
    fn mean(&self) -> f64 {
        1.0
    }
    fn sample(&self, rng: &mut Rng) -> usize {
        let limit = (-1.0f64).exp();
        let mut k = 0;
        let mut prod: f64 = rng.gen();
        while prod > limit {
            k += 1;
            prod *= rng.gen::<f64>();
        }
        k
    }
}

/// An explicit finite pmf `p[0], p[1], ...` with mean one.
#[derive(Debug, Clone)]
pub struct FinitePmf {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl FinitePmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::domain("probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        let mean: f64 = probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        if (mean - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "offspring mean {mean} is not 1 (the tree would not be critical)"
            )));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(FinitePmf { probs, cumulative })
    }
}

impl OffspringLaw for FinitePmf {
    fn name(&self) -> String {
        let ps: Vec<String> = self.probs.iter().map(|p| p.to_string()).collect();
        format!("pmf:{}", ps.join(","))
    }
    fn pmf(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }
    fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
    fn sample(&self, rng: &mut Rng) -> usize {
        let u: f64 = rng.gen::<f64>() * self.cumulative.last().unwrap();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.probs.len() - 1)
    }
}

/// Looks up an offspring law by name: `geometric`, `poisson`, or
/// `pmf:p0,p1,...`.
pub fn offspring_law(spec: &str) -> Result<Box<dyn OffspringLaw>> {
    match spec {
        "geometric" => Ok(Box::new(GeometricHalf)),
        "poisson" => Ok(Box::new(PoissonOne)),
        s if s.starts_with("pmf:") => {
            let probs = s[4..]
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::domain(format!("bad probability `{t}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Box::new(FinitePmf::new(probs)?))
        }
        other => Err(Error::domain(format!("unknown offspring law `{other}`"))),
    }
}

/// A rooted tree with unit conductances, vertices in preorder.
#[derive(Debug, Clone)]
pub struct TreeGraph {
    pub net: Network,
    pub root: Vertex,
    /// Offspring count of each vertex in preorder.
    pub offspring: Vec<usize>,
}

impl TreeGraph {
    pub fn size(&self) -> usize {
        self.net.len()
    }

    /// Graph distance from the root, which is also the resistance.
    pub fn depths(&self) -> Vec<usize> {
        self.net.hop_distances(self.root)
    }

    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    /// Builds a tree from a valid preorder offspring sequence.
    pub fn from_offspring(offspring: Vec<usize>) -> Result<Self> {
        let n = offspring.len();
        if n == 0 || offspring.iter().sum::<usize>() != n - 1 {
            return Err(Error::domain("offspring sequence does not encode a tree"));
        }
        let mut edges = Vec::with_capacity(n - 1);
        // (vertex, children still to attach)
        let mut stack: Vec<(Vertex, usize)> = Vec::new();
        for (v, &k) in offspring.iter().enumerate() {
            if v > 0 {
                let top = stack
                    .last_mut()
                    .ok_or_else(|| Error::domain("offspring sequence does not encode a tree"))?;
                edges.push((top.0, v, 1.0));
                top.1 -= 1;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            if k > 0 {
                stack.push((v, k));
            }
        }
        Ok(TreeGraph {
            net: Network::unlabeled(n, &edges)?,
            root: 0,
            offspring,
        })
    }
}

/// Rotates an offspring sequence summing to `n - 1` into the unique valid
/// preorder sequence among its cyclic shifts.
fn cycle_lemma_rotation(xi: &mut [usize]) {
    let mut walk: i64 = 0;
    let mut min = i64::MAX;
    let mut argmin = 0;
    for (i, &k) in xi.iter().enumerate() {
        walk += k as i64 - 1;
        if walk < min {
            min = walk;
            argmin = i;
        }
    }
    xi.rotate_left((argmin + 1) % xi.len());
}

/// Draws a Galton-Watson tree conditioned to have exactly `n` vertices.
pub fn gw_tree(law: &dyn OffspringLaw, n: usize, seed: RandomSeed) -> Result<TreeGraph> {
    gw_tree_with_budget(law, n, seed, MAX_ATTEMPTS)
}

pub fn gw_tree_with_budget(
    law: &dyn OffspringLaw,
    n: usize,
    seed: RandomSeed,
    budget: u64,
) -> Result<TreeGraph> {
    if n == 0 {
        return Err(Error::domain("tree size must be at least 1"));
    }
    if (law.mean() - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("offspring law `{}` is not critical", law.name())));
    }
    let mut rng = seed.rng();
    let mut xi = vec![0usize; n];
    for _ in 0..budget {
        let mut total = 0usize;
        for slot in xi.iter_mut() {
            *slot = law.sample(&mut rng);
            total += *slot;
            if total > n - 1 {
                break;
            }
        }
        if total == n - 1 {
            cycle_lemma_rotation(&mut xi);
            return TreeGraph::from_offspring(xi);
        }
    }
    Err(Error::RejectionBudget { attempts: budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_trees() {
        let t1 = gw_tree(&GeometricHalf, 1, RandomSeed(0)).unwrap();
        assert_eq!(t1.size(), 1);
        let t2 = gw_tree(&GeometricHalf, 2, RandomSeed(0)).unwrap();
        assert_eq!(t2.offspring, vec![1, 0]);
        assert_eq!(t2.net.edges().len(), 1);
    }

    #[test]
    fn trees_are_trees() {
        for (i, law) in [offspring_law("geometric").unwrap(), offspring_law("poisson").unwrap()]
            .iter()
            .enumerate()
        {
            for n in [3, 10, 57] {
                let t = gw_tree(law.as_ref(), n, RandomSeed(i as u64 * 100 + n as u64)).unwrap();
                assert_eq!(t.size(), n);
                assert_eq!(t.net.edges().len(), n - 1);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = gw_tree(&PoissonOne, 40, RandomSeed(5)).unwrap();
        let b = gw_tree(&PoissonOne, 40, RandomSeed(5)).unwrap();
        assert_eq!(a.offspring, b.offspring);
    }

    #[test]
    fn rotation_yields_valid_sequence() {
        let mut xi = vec![0, 0, 2, 2, 0];
        cycle_lemma_rotation(&mut xi);
        assert_eq!(xi, vec![2, 2, 0, 0, 0]);
        assert!(TreeGraph::from_offspring(xi).is_ok());
    }

    #[test]
    fn invalid_sequences_are_rejected() {
        assert!(TreeGraph::from_offspring(vec![0, 1]).is_err());
        assert!(TreeGraph::from_offspring(vec![2, 0]).is_err());
    }

    #[test]
    fn pmf_validation() {
        assert!(offspring_law("pmf:0.25,0.5,0.25").is_ok());
        assert!(offspring_law("pmf:0.5,0.5").is_err());
        assert!(offspring_law("pmf:0.5,0.6").is_err());
        assert!(offspring_law("binomial").is_err());
    }

    #[test]
    fn builtin_pmfs_sum_to_one() {
        for law in [offspring_law("geometric").unwrap(), offspring_law("poisson").unwrap()] {
            let total: f64 = (0..60).map(|k| law.pmf(k)).sum();
            let mean: f64 = (0..60).map(|k| k as f64 * law.pmf(k)).sum();
            assert_close!(total, 1.0, 1e-12);
            assert_close!(mean, 1.0, 1e-12);
        }
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let err = gw_tree_with_budget(&GeometricHalf, 500, RandomSeed(1), 1).unwrap_err();
        assert!(matches!(err, Error::RejectionBudget { attempts: 1 }));
    }
}
