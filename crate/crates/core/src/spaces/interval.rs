use crate::error::{Error, Result};
use crate::network::{network_from_resistance, Network, ResistanceMatrix};

/// Path on `k + 1` vertices whose endpoints are at resistance `total_resistance`.
///
/// Each edge has conductance `k / total_resistance`, so vertex `i` sits at
/// resistance `i/k · total_resistance` from vertex 0, a discretization of
/// the interval with the Euclidean metric.
pub fn path_graph(k: usize, total_resistance: f64) -> Result<Network> {
    if k == 0 {
        return Err(Error::domain("a path needs at least one edge"));
    }
    if !(total_resistance > 0.0 && total_resistance.is_finite()) {
        return Err(Error::domain("total resistance must be positive"));
    }
    let c = k as f64 / total_resistance;
    let edges: Vec<_> = (0..k).map(|i| (i, i + 1, c)).collect();
    Network::unlabeled(k + 1, &edges)
}

/// `k` evenly spaced points of `[0, 1]` with metric `|x - y|^(α-1)`,
/// realized as a network.
///
/// For `α = 2` this is the Euclidean metric and the witness is a path; for
/// `α < 2` the witness has long-range edges.
pub fn alpha_interval_space(k: usize, alpha: f64) -> Result<Network> {
    if k < 2 {
        return Err(Error::domain("need at least two grid points"));
    }
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::domain(format!("alpha = {alpha} outside (1, 2]")));
    }
    network_from_resistance(&alpha_interval_metric(k, alpha)?)
}

/// The matrix `|x_i - x_j|^(α-1)` on the grid `x_i = i / (k - 1)`.
pub fn alpha_interval_metric(k: usize, alpha: f64) -> Result<ResistanceMatrix> {
    let step = 1.0 / (k - 1) as f64;
    ResistanceMatrix::from_fn(k, |i, j| ((i as f64 - j as f64).abs() * step).powf(alpha - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_unit_edge() {
        let p = path_graph(1, 1.0).unwrap();
        assert_eq!(p.edges().len(), 1);
        assert_eq!(p.edges()[0].conductance, 1.0);
    }

    #[test]
    fn interior_points_sit_at_euclidean_distance() {
        let p = path_graph(4, 1.0).unwrap();
        assert_close!(p.effective_resistance(0, 4).unwrap(), 1.0, 1e-12);
        for i in 0..=4 {
            assert_close!(p.effective_resistance(0, i).unwrap(), i as f64 / 4.0, 1e-12);
        }
    }

    #[test]
    fn alpha_two_recovers_path() {
        let net = alpha_interval_space(6, 2.0).unwrap();
        assert_eq!(net.edges().len(), 5);
        for e in net.edges() {
            assert_eq!(e.v, e.u + 1);
            assert_close!(e.conductance, 5.0, 1e-9);
        }
    }

    #[test]
    fn two_points_single_edge() {
        for alpha in [1.25, 1.5, 2.0] {
            let net = alpha_interval_space(2, alpha).unwrap();
            assert_eq!(net.edges().len(), 1);
            assert_close!(net.edges()[0].conductance, 1.0, 1e-12);
        }
    }

    #[test]
    fn fractional_round_trip() {
        let r = alpha_interval_metric(5, 1.5).unwrap();
        let back = alpha_interval_space(5, 1.5).unwrap().resistance_matrix();
        for i in 0..5 {
            for j in 0..5 {
                assert_close!(back.get(i, j), r.get(i, j), 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(path_graph(0, 1.0).is_err());
        assert!(alpha_interval_space(1, 1.5).is_err());
        assert!(alpha_interval_space(4, 1.0).is_err());
        assert!(alpha_interval_space(4, 2.5).is_err());
    }
}
