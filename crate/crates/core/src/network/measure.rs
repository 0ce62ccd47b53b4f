use crate::error::{Error, Result};

use super::{Network, Vertex};

/// A full-support measure on the vertex set: one strictly positive weight per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexMeasure {
    weights: Vec<f64>,
}

impl VertexMeasure {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((v, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::domain(format!(
                "measure weight {w} at vertex {v} is not strictly positive"
            )));
        }
        Ok(VertexMeasure { weights })
    }

    pub fn uniform(n: usize, weight: f64) -> Self {
        assert!(weight > 0.0 && weight.is_finite());
        VertexMeasure {
            weights: vec![weight; n],
        }
    }

    /// The constant-speed measure `μ(x) = c(x)`.
    ///
    /// On a single-vertex network `c(x) = 0`, so the unit weight is used instead.
    pub fn csrw(net: &Network) -> Self {
        if net.len() == 1 {
            return VertexMeasure::uniform(1, 1.0);
        }
        VertexMeasure {
            weights: net.weighted_degrees().to_vec(),
        }
    }

    /// The variable-speed measure `μ(x) = 1`.
    pub fn vsrw(net: &Network) -> Self {
        VertexMeasure::uniform(net.len(), 1.0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, v: Vertex) -> f64 {
        self.weights[v]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Returns the measure multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        VertexMeasure::new(self.weights.iter().map(|w| w * factor).collect())
    }

    pub(crate) fn check_network(&self, net: &Network) -> Result<()> {
        if self.len() == net.len() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "measure has {} weights but the network has {} vertices",
                self.len(),
                net.len()
            )))
        }
    }
}
