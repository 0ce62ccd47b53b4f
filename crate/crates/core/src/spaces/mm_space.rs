use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::{Network, Vertex, VertexMeasure};

/// A finite metric-measure space with a marked root.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMMSpace {
    labels: Vec<String>,
    metric: DMatrix<f64>,
    measure: Vec<f64>,
    root: usize,
}

impl FiniteMMSpace {
    /// Validates the metric axioms (triangle inequality up to a relative
    /// `1e-9` of the diameter) and a strictly positive measure.
    pub fn new(
        labels: Vec<String>,
        metric: DMatrix<f64>,
        measure: Vec<f64>,
        root: usize,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::domain("space must have at least one point"));
        }
        if metric.nrows() != n || metric.ncols() != n || measure.len() != n {
            return Err(Error::domain("metric, measure and labels disagree in size"));
        }
        if root >= n {
            return Err(Error::domain("root out of range"));
        }
        if measure.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::domain("measure must be strictly positive"));
        }
        let diam = metric.max();
        let slack = 1e-9 * diam.max(f64::MIN_POSITIVE);
        for i in 0..n {
            if metric[(i, i)] != 0.0 {
                return Err(Error::domain("metric has a nonzero diagonal"));
            }
            for j in 0..n {
                let d = metric[(i, j)];
                if i != j && !(d > 0.0 && d.is_finite()) {
                    return Err(Error::domain("distinct points must be at positive distance"));
                }
                if d != metric[(j, i)] {
                    return Err(Error::domain("metric is not symmetric"));
                }
                for k in 0..n {
                    if metric[(i, k)] > d + metric[(j, k)] + slack {
                        return Err(Error::domain("metric violates the triangle inequality"));
                    }
                }
            }
        }
        Ok(FiniteMMSpace {
            labels,
            metric,
            measure,
            root,
        })
    }

    pub fn unlabeled(metric: DMatrix<f64>, measure: Vec<f64>, root: usize) -> Result<Self> {
        let labels = (0..metric.nrows()).map(|i| i.to_string()).collect();
        FiniteMMSpace::new(labels, metric, measure, root)
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

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.metric[(i, j)]
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn total_mass(&self) -> f64 {
        self.measure.iter().sum()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn diameter(&self) -> f64 {
        self.metric.max()
    }

    /// Smallest distance between distinct points, or `None` for one point.
    pub fn min_positive_distance(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .min_by(|a, b| a.total_cmp(b))
    }

    /// The sub-space on `points` (root must be among them), carrying the
    /// given measure or, if `None`, the restriction of this one.
    pub fn subspace(
        &self,
        points: &[usize],
        measure: Option<Vec<f64>>,
        root: usize,
    ) -> Result<FiniteMMSpace> {
        let root_pos = points
            .iter()
            .position(|&p| p == root)
            .ok_or_else(|| Error::domain("root must belong to the subspace"))?;
        let metric = DMatrix::from_fn(points.len(), points.len(), |i, j| {
            self.dist(points[i], points[j])
        });
        let measure = measure.unwrap_or_else(|| points.iter().map(|&p| self.measure[p]).collect());
        let labels = points.iter().map(|&p| self.labels[p].clone()).collect();
        FiniteMMSpace::new(labels, metric, measure, root_pos)
    }

    /// Reorders points so that new point `i` is old point `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Result<FiniteMMSpace> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&o| o >= self.len() || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::domain("not a permutation"));
        }
        self.subspace(order, None, self.root)
    }

    /// Multiplies distances and masses by the given factors.
    pub fn rescaled(&self, metric_scale: f64, measure_scale: f64) -> Result<FiniteMMSpace> {
        if !(metric_scale > 0.0 && measure_scale > 0.0) {
            return Err(Error::domain("scales must be positive"));
        }
        FiniteMMSpace::new(
            self.labels.clone(),
            &self.metric * metric_scale,
            self.measure.iter().map(|m| m * measure_scale).collect(),
            self.root,
        )
    }
}

/// Packages a network as `(V, a·R, b·μ, ρ)`.
pub fn as_mm_space(
    net: &Network,
    mu: &VertexMeasure,
    root: Vertex,
    metric_scale: f64,
    measure_scale: f64,
) -> Result<FiniteMMSpace> {
    net.check_vertex(root)?;
    mu.check_network(net)?;
    if !(metric_scale > 0.0 && measure_scale > 0.0) {
        return Err(Error::domain("scales must be positive"));
    }
    let r = net.resistance_matrix();
    FiniteMMSpace::new(
        net.labels().to_vec(),
        r.matrix() * metric_scale,
        mu.weights().iter().map(|w| w * measure_scale).collect(),
        root,
    )
}
