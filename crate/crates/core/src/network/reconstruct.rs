//! Recovering conductances from a resistance matrix.
//!
//! Fix a base vertex `x0`. The Green matrix of the walk killed at `x0`,
//! `G(y, z) = (R(x0,y) + R(x0,z) - R(y,z)) / 2` on `V \ {x0}`, is the inverse
//! of the Laplacian grounded at `x0`. Inverting it yields the off-diagonal
//! conductances directly, and the conductances to `x0` as row sums.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{dense_residual, refine_inverse, Dd, DdMatrix};

use super::{Network, ResistanceMatrix, Vertex};

#[derive(Debug, Clone, Copy)]
pub struct ReconstructOptions {
    /// Recovered conductances below `-tolerance` reject the input; those
    /// with magnitude below `tolerance` are treated as absent edges.
    pub tolerance: f64,
    pub base: Vertex,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            tolerance: 1e-9,
            base: 0,
        }
    }
}

/// Reconstructs the unique network whose effective resistance is `r`.
pub fn network_from_resistance(r: &ResistanceMatrix) -> Result<Network> {
    network_from_resistance_with(r, ReconstructOptions::default())
}

pub fn network_from_resistance_with(
    r: &ResistanceMatrix,
    opts: ReconstructOptions,
) -> Result<Network> {
    let n = r.len();
    let labels = r.labels().to_vec();
    if n == 0 {
        return Err(Error::domain("empty resistance matrix"));
    }
    if opts.base >= n {
        return Err(Error::domain(format!("base vertex {} out of range", opts.base)));
    }
    if n == 1 {
        return Network::new(labels, &[]);
    }
    let x0 = opts.base;
    let others: Vec<Vertex> = (0..n).filter(|&v| v != x0).collect();
    let m = others.len();
    let green = DdMatrix::from_fn(m, |i, j| {
        let (y, z) = (others[i], others[j]);
        (r.get_extended(x0, y) + r.get_extended(x0, z) - r.get_extended(y, z)).scale(0.5)
    });
    let lap0 = green
        .hi
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotAResistanceMetric("Green matrix is not positive definite".into()))?
        .inverse();
    let mut lap = DdMatrix {
        lo: DMatrix::zeros(m, m),
        hi: lap0,
    };
    refine_inverse(&mut lap, 2, |x| dense_residual(&green, x));

    let mut edges = Vec::new();
    let mut accept = |a: Vertex, b: Vertex, c: f64| -> Result<()> {
        if c < -opts.tolerance {
            return Err(Error::NotAResistanceMetric(format!(
                "recovered conductance {c:e} between `{}` and `{}` is negative",
                r.labels()[a],
                r.labels()[b]
            )));
        }
        if c >= opts.tolerance {
            edges.push((a, b, c));
        }
        Ok(())
    };
    for i in 0..m {
        let row_sum = (0..m).fold(Dd::ZERO, |acc, j| {
            acc + (lap.get(i, j) + lap.get(j, i)).scale(0.5)
        });
        accept(others[i], x0, row_sum.to_f64())?;
        for j in (i + 1)..m {
            let off = (lap.get(i, j) + lap.get(j, i)).scale(-0.5);
            accept(others[i], others[j], off.to_f64())?;
        }
    }
    Network::new(labels, &edges).map_err(|e| match e {
        Error::Disconnected { .. } => {
            Error::NotAResistanceMetric("recovered conductances leave the graph disconnected".into())
        }
        other => other,
    })
}

/// Outcome of the resistance-metric membership test.
#[derive(Debug, Clone)]
pub struct MetricDecision {
    pub witness: Option<Network>,
    /// Why the matrix was rejected, when it was.
    pub reason: Option<String>,
}

impl MetricDecision {
    pub fn accepted(&self) -> bool {
        self.witness.is_some()
    }
}

/// Decides whether `r` is the effective resistance of some network,
/// returning the realizing network as a witness.
pub fn is_resistance_metric(r: &ResistanceMatrix) -> MetricDecision {
    match network_from_resistance(r) {
        Ok(net) => MetricDecision {
            witness: Some(net),
            reason: None,
        },
        Err(e) => MetricDecision {
            witness: None,
            reason: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Network {
        Network::unlabeled(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn single_unit_edge_round_trip() {
        let r = Network::unlabeled(2, &[(0, 1, 1.0)]).unwrap().resistance_matrix();
        let net = network_from_resistance(&r).unwrap();
        assert_eq!(net.edges().len(), 1);
        assert_close!(net.edges()[0].conductance, 1.0, 1e-12);
    }

    #[test]
    fn triangle_round_trip() {
        let net = network_from_resistance(&triangle().resistance_matrix()).unwrap();
        assert_eq!(net.edges().len(), 3);
        for e in net.edges() {
            assert_close!(e.conductance, 1.0, 1e-9);
        }
    }

    #[test]
    fn euclidean_line_is_a_path() {
        let pts = [0.0_f64, 1.0, 3.0];
        let r = ResistanceMatrix::from_fn(3, |i, j| (pts[i] - pts[j]).abs()).unwrap();
        let net = network_from_resistance(&r).unwrap();
        assert_eq!(net.edges().len(), 2);
        assert_close!(net.conductance(0, 1).unwrap(), 1.0, 1e-12);
        assert_close!(net.conductance(1, 2).unwrap(), 0.5, 1e-12);
        assert!(net.conductance(0, 2).is_none());
    }

    #[test]
    fn unit_square_is_rejected() {
        let pts = [(0.0_f64, 0.0_f64), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let r = ResistanceMatrix::from_fn(4, |i, j| {
            ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
        })
        .unwrap();
        let decision = is_resistance_metric(&r);
        assert!(!decision.accepted());
        assert!(decision.reason.unwrap().contains("negative"));
    }

    #[test]
    fn two_points_always_accepted() {
        for d in [1e-3, 0.5, 7.0, 1e4] {
            let r = ResistanceMatrix::from_fn(2, |_, _| d).unwrap();
            let decision = is_resistance_metric(&r);
            let net = decision.witness.unwrap();
            assert_close!(net.edges()[0].conductance, 1.0 / d, 1e-9 / d);
        }
    }

    #[test]
    fn base_vertex_does_not_matter() {
        let r = triangle().resistance_matrix();
        for base in 0..3 {
            let net =
                network_from_resistance_with(&r, ReconstructOptions { base, ..Default::default() })
                    .unwrap();
            for e in net.edges() {
                assert_close!(e.conductance, 1.0, 1e-9);
            }
        }
    }

    #[test]
    fn single_point_matrix() {
        let r = ResistanceMatrix::unlabeled(DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(network_from_resistance(&r).unwrap().len(), 1);
    }
}
