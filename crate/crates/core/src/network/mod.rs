//! Finite weighted graphs viewed as electrical networks.
//!
//! A [`Network`] owns a canonically ordered vertex set and strictly positive
//! symmetric conductances. Vertices are addressed by their index in that
//! order; labels are opaque strings used only for input and output.

mod measure;
mod reconstruct;
mod resistance;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

pub use measure::VertexMeasure;
pub use reconstruct::{
    is_resistance_metric, network_from_resistance, network_from_resistance_with, MetricDecision,
    ReconstructOptions,
};
pub use resistance::{ResistanceMatrix, Shorted};

/// Index of a vertex in the canonical ordering of a [`Network`].
pub type Vertex = usize;

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub conductance: f64,
}

/// A finite connected electrical network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    labels: Vec<String>,
    index: HashMap<String, Vertex>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(Vertex, f64)>>,
    weighted_degree: Vec<f64>,
}

impl Network {
    /// Builds a network from labels and an edge list over label indices.
    ///
    /// Parallel edges are merged by adding their conductances. Self-loops,
    /// non-positive or non-finite conductances, duplicate labels and
    /// disconnected graphs are rejected.
    pub fn new(labels: Vec<String>, edges: &[(Vertex, Vertex, f64)]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::domain("network must have at least one vertex"));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::domain(format!("duplicate vertex label `{label}`")));
            }
        }
        let mut merged: BTreeMap<(Vertex, Vertex), f64> = BTreeMap::new();
        for &(a, b, c) in edges {
            if a >= n || b >= n {
                return Err(Error::domain(format!("edge ({a}, {b}) references a missing vertex")));
            }
            if a == b {
                return Err(Error::domain(format!("self-loop at `{}`", labels[a])));
            }
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::domain(format!(
                    "conductance {c} on edge ({}, {}) is not strictly positive",
                    labels[a], labels[b]
                )));
            }
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += c;
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), conductance)| Edge { u, v, conductance })
            .collect();
        let mut adjacency = vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.u].push((e.v, e.conductance));
            adjacency[e.v].push((e.u, e.conductance));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_by_key(|&(w, _)| w);
        }
        let weighted_degree = adjacency
            .iter()
            .map(|nbrs| nbrs.iter().map(|&(_, c)| c).sum())
            .collect();
        let net = Network {
            labels,
            index,
            edges,
            adjacency,
            weighted_degree,
        };
        let components = net.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(net)
    }

    /// Builds a network whose labels are the decimal vertex indices.
    pub fn unlabeled(n: usize, edges: &[(Vertex, Vertex, f64)]) -> Result<Self> {
        Network::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v]
    }

    /// Looks up a vertex by label.
    pub fn vertex(&self, label: &str) -> Option<Vertex> {
        self.index.get(label).copied()
    }

    /// Edges in canonical `(u, v)` order with `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `v` with their conductances, sorted by neighbour index.
    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, f64)] {
        &self.adjacency[v]
    }

    pub fn conductance(&self, u: Vertex, v: Vertex) -> Option<f64> {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.adjacency[u][i].1)
    }

    /// Total conductance `c(x)` at a vertex.
    pub fn weighted_degree(&self, v: Vertex) -> f64 {
        self.weighted_degree[v]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.weighted_degree
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "vertex {v} out of range for a network on {} vertices",
                self.len()
            )))
        }
    }

    pub(crate) fn check_function(&self, f: &[f64], what: &str) -> Result<()> {
        if f.len() == self.len() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "{what} has {} values but the network has {} vertices",
                f.len(),
                self.len()
            )))
        }
    }

    /// Returns a copy with every conductance replaced by `f(edge)`.
    pub fn map_conductances(&self, mut f: impl FnMut(&Edge) -> f64) -> Result<Network> {
        let edges: Vec<_> = self.edges.iter().map(|e| (e.u, e.v, f(e))).collect();
        Network::new(self.labels.clone(), &edges)
    }

    /// Electrical energy `E(f, g) = ½ Σ_{x~y} c(x,y)(f(x)-f(y))(g(x)-g(y))`.
    ///
    /// Each undirected edge is counted once, which absorbs the factor ½ of
    /// the sum over ordered pairs.
    pub fn energy(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_function(f, "f")?;
        self.check_function(g, "g")?;
        Ok(self
            .edges
            .iter()
            .map(|e| e.conductance * (f[e.u] - f[e.v]) * (g[e.u] - g[e.v]))
            .sum())
    }

    /// Generator `(Δf)(x) = μ(x)⁻¹ Σ_y c(x,y)(f(y) - f(x))`.
    pub fn laplacian_apply(&self, mu: &VertexMeasure, f: &[f64]) -> Result<Vec<f64>> {
        self.check_function(f, "f")?;
        mu.check_network(self)?;
        Ok((0..self.len())
            .map(|x| {
                let flux: f64 = self.adjacency[x]
                    .iter()
                    .map(|&(y, c)| c * (f[y] - f[x]))
                    .sum();
                flux / mu.weight(x)
            })
            .collect())
    }

    fn component_count(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adjacency[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        count
    }

    /// Hop distances from `source` (shortest path metric with unit edge lengths).
    pub fn hop_distances(&self, source: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }
}

/// Incremental construction of a [`Network`] from labelled edges.
///
/// Vertices are ordered by first appearance.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    labels: Vec<String>,
    index: HashMap<String, Vertex>,
    edges: Vec<(Vertex, Vertex, f64)>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares a vertex, returning its index.
    pub fn vertex(&mut self, label: &str) -> Vertex {
        if let Some(&v) = self.index.get(label) {
            return v;
        }
        let v = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), v);
        v
    }

    pub fn edge(&mut self, a: &str, b: &str, conductance: f64) -> &mut Self {
        let u = self.vertex(a);
        let v = self.vertex(b);
        self.edges.push((u, v, conductance));
        self
    }

    pub fn build(self) -> Result<Network> {
        Network::new(self.labels, &self.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Network {
        Network::unlabeled(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn single_edge_indicator_energy() {
        let net = Network::unlabeled(2, &[(0, 1, 1.0)]).unwrap();
        let f = [1.0, 0.0];
        assert_eq!(net.energy(&f, &f).unwrap(), 1.0);
    }

    #[test]
    fn constant_has_zero_energy() {
        let net = triangle();
        let f = [3.5; 3];
        assert_eq!(net.energy(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn triangle_indicator_energy() {
        let f = [1.0, 0.0, 0.0];
        assert_eq!(triangle().energy(&f, &f).unwrap(), 2.0);
    }

    #[test]
    fn energy_rejects_short_function() {
        assert!(matches!(
            triangle().energy(&[1.0, 0.0], &[1.0, 0.0, 0.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn laplacian_on_path() {
        let net = Network::unlabeled(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let mu = VertexMeasure::uniform(3, 1.0);
        let lap = net.laplacian_apply(&mu, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(lap, vec![1.0, -2.0, 1.0]);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let net = triangle();
        let mu = VertexMeasure::new(vec![1.0, 2.0, 3.0]).unwrap();
        let lap = net.laplacian_apply(&mu, &[2.0; 3]).unwrap();
        assert!(lap.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn parallel_edges_are_merged() {
        let net = Network::unlabeled(2, &[(0, 1, 1.0), (1, 0, 2.5)]).unwrap();
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.conductance(0, 1), Some(3.5));
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(Network::unlabeled(2, &[(0, 0, 1.0)]).is_err());
        assert!(Network::unlabeled(2, &[(0, 1, 0.0)]).is_err());
        assert!(Network::unlabeled(2, &[(0, 1, -1.0)]).is_err());
        assert!(Network::unlabeled(2, &[(0, 1, f64::NAN)]).is_err());
        assert!(Network::unlabeled(2, &[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn disconnected_is_an_error() {
        let err = Network::unlabeled(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::Disconnected { components: 2 }));
    }

    #[test]
    fn single_vertex_is_legal() {
        let net = Network::unlabeled(1, &[]).unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.weighted_degree(0), 0.0);
    }

    #[test]
    fn builder_orders_by_first_appearance() {
        let mut b = NetworkBuilder::new();
        b.edge("b", "a", 1.0).edge("a", "c", 2.0);
        let net = b.build().unwrap();
        assert_eq!(net.labels(), &["b", "a", "c"]);
        assert_eq!(net.vertex("c"), Some(2));
        assert_eq!(net.weighted_degree(1), 3.0);
    }
}
