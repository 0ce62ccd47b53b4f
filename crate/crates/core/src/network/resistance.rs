//! Effective resistance, all-pairs resistance matrices and shorting.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric::{refine_inverse, sparse_residual, Dd, DdMatrix};

use super::{Network, Vertex};

/// Pairwise effective resistances, indexed by the canonical vertex order.
///
/// Matrices computed from a network also carry a low-order correction per
/// entry (double-double precision), which keeps the reconstruction of
/// conductances accurate when they span many orders of magnitude. Matrices
/// built from plain f64 data have a zero correction.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceMatrix {
    labels: Vec<String>,
    values: DMatrix<f64>,
    low: DMatrix<f64>,
}

impl ResistanceMatrix {
    /// Wraps a matrix after checking symmetry, zero diagonal and positive
    /// off-diagonal entries. The triangle inequality is not enforced here;
    /// see [`ResistanceMatrix::triangle_violation`].
    pub fn new(labels: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        let n = labels.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::domain(format!(
                "matrix is {}x{} but {} labels were given",
                values.nrows(),
                values.ncols(),
                n
            )));
        }
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::domain(format!("diagonal entry {i} is {}", values[(i, i)])));
            }
            for j in (i + 1)..n {
                let (a, b) = (values[(i, j)], values[(j, i)]);
                if !(a.is_finite() && a > 0.0) {
                    return Err(Error::domain(format!(
                        "off-diagonal entry ({i}, {j}) = {a} is not strictly positive"
                    )));
                }
                if (a - b).abs() > 1e-12 * a.abs().max(b.abs()) {
                    return Err(Error::domain(format!("entries ({i}, {j}) are not symmetric")));
                }
            }
        }
        let low = DMatrix::zeros(n, n);
        Ok(ResistanceMatrix { labels, values, low })
    }

    pub fn unlabeled(values: DMatrix<f64>) -> Result<Self> {
        let labels = (0..values.nrows()).map(|i| i.to_string()).collect();
        ResistanceMatrix::new(labels, values)
    }

    /// Builds `R(i, j) = d(points[i], points[j])` from a distance function.
    pub fn from_fn(n: usize, mut dist: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let values = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { dist(i, j) });
        ResistanceMatrix::unlabeled(values)
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

    pub fn get(&self, x: Vertex, y: Vertex) -> f64 {
        self.values[(x, y)]
    }

    pub(crate) fn get_extended(&self, x: Vertex, y: Vertex) -> Dd {
        Dd {
            hi: self.values[(x, y)],
            lo: self.low[(x, y)],
        }
    }

    /// Returns the matrix multiplied by `factor`, correction included.
    pub fn scaled(&self, factor: f64) -> ResistanceMatrix {
        let n = self.len();
        let mut out = self.clone();
        for j in 0..n {
            for i in 0..n {
                let v = self.get_extended(i, j).scale(factor);
                out.values[(i, j)] = v.hi;
                out.low[(i, j)] = v.lo;
            }
        }
        out
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn diameter(&self) -> f64 {
        self.values.max()
    }

    /// Largest `R(x,z) - R(x,y) - R(y,z)`, or zero if the triangle inequality holds.
    pub fn triangle_violation(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    worst = worst.max(self.get(x, z) - self.get(x, y) - self.get(y, z));
                }
            }
        }
        worst
    }
}

/// Dense Laplacian with the row and column of `ground` removed.
///
/// Row `i` of the result corresponds to vertex `i` if `i < ground` and to
/// vertex `i + 1` otherwise.
pub(crate) fn grounded_laplacian(net: &Network, ground: Vertex) -> DMatrix<f64> {
    let n = net.len();
    let idx = |v: Vertex| if v < ground { v } else { v - 1 };
    let mut lap = DMatrix::zeros(n - 1, n - 1);
    for x in (0..n).filter(|&x| x != ground) {
        lap[(idx(x), idx(x))] = net.weighted_degree(x);
        for &(y, c) in net.neighbors(x) {
            if y != ground {
                lap[(idx(x), idx(y))] = -c;
            }
        }
    }
    lap
}

impl Network {
    /// Potential `h` minimizing the energy subject to `h(x) = 1`, `h(y) = 0`.
    ///
    /// The minimal energy `E(h, h)` is `1 / R(x, y)`.
    pub fn harmonic_potential(&self, x: Vertex, y: Vertex) -> Result<Vec<f64>> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Err(Error::domain("harmonic potential needs distinct endpoints"));
        }
        let v = self.unit_current_potential(x, y)?;
        let scale = v[x];
        Ok(v.into_iter().map(|p| p / scale).collect())
    }

    /// Potential of a unit current injected at `x` and extracted at the
    /// grounded vertex `y`; its value at `x` is `R(x, y)`.
    fn unit_current_potential(&self, x: Vertex, y: Vertex) -> Result<Vec<f64>> {
        let lap = grounded_laplacian(self, y);
        let chol = lap
            .cholesky()
            .ok_or_else(|| Error::Singular("grounded Laplacian is not positive definite".into()))?;
        let xi = if x < y { x } else { x - 1 };
        let mut rhs = DVector::zeros(self.len() - 1);
        rhs[xi] = 1.0;
        let sol = chol.solve(&rhs);
        let mut v = Vec::with_capacity(self.len());
        v.extend(sol.iter().take(y).copied());
        v.push(0.0);
        v.extend(sol.iter().skip(y).copied());
        Ok(v)
    }

    /// Effective resistance between two vertices.
    pub fn effective_resistance(&self, x: Vertex, y: Vertex) -> Result<f64> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        if x == y {
            return Ok(0.0);
        }
        Ok(self.unit_current_potential(x, y)?[x])
    }

    /// All-pairs effective resistances from a single factorization.
    ///
    /// Uses the inverse `G` of the Laplacian grounded at vertex 0 (a
    /// generalized inverse of the full Laplacian), so that
    /// `R(x, y) = G(x,x) + G(y,y) - 2 G(x,y)`. The inverse is refined twice
    /// against the sparse Laplacian with double-double residuals.
    pub fn resistance_matrix(&self) -> ResistanceMatrix {
        let n = self.len();
        let mut values = DMatrix::zeros(n, n);
        let mut low = DMatrix::zeros(n, n);
        if n > 1 {
            let green0 = grounded_laplacian(self, 0)
                .cholesky()
                .expect("grounded Laplacian of a connected network is positive definite")
                .inverse();
            let diag: Vec<Dd> = (1..n)
                .map(|x| {
                    self.neighbors(x)
                        .iter()
                        .fold(Dd::ZERO, |acc, &(_, c)| acc + c)
                })
                .collect();
            let rows: Vec<Vec<(usize, f64)>> = (1..n)
                .map(|x| {
                    self.neighbors(x)
                        .iter()
                        .filter(|&&(y, _)| y != 0)
                        .map(|&(y, c)| (y - 1, -c))
                        .collect()
                })
                .collect();
            let mut green = DdMatrix {
                lo: DMatrix::zeros(n - 1, n - 1),
                hi: green0,
            };
            refine_inverse(&mut green, 2, |g| sparse_residual(&diag, &rows, g));
            let g = |a: Vertex, b: Vertex| {
                if a == 0 || b == 0 {
                    Dd::ZERO
                } else {
                    green.get(a - 1, b - 1)
                }
            };
            for x in 0..n {
                for y in (x + 1)..n {
                    let r = g(x, x) + g(y, y) - g(x, y).scale(2.0);
                    values[(x, y)] = r.hi;
                    values[(y, x)] = r.hi;
                    low[(x, y)] = r.lo;
                    low[(y, x)] = r.lo;
                }
            }
        }
        ResistanceMatrix {
            labels: self.labels.clone(),
            values,
            low,
        }
    }

    /// Contracts `set` to a single vertex.
    pub fn short(&self, set: &[Vertex]) -> Result<Shorted> {
        Shorted::new(self, set)
    }

    /// Resistance `R_A(y, z)` with `A` shorted.
    pub fn shorted_resistance(&self, set: &[Vertex], y: Vertex, z: Vertex) -> Result<f64> {
        self.check_vertex(y)?;
        self.check_vertex(z)?;
        let shorted = self.short(set)?;
        shorted
            .network()
            .effective_resistance(shorted.image(y), shorted.image(z))
    }

    /// Resistance `R(y, A)` between a vertex and a set.
    pub fn resistance_to_set(&self, y: Vertex, set: &[Vertex]) -> Result<f64> {
        self.check_vertex(y)?;
        let shorted = self.short(set)?;
        shorted
            .network()
            .effective_resistance(shorted.image(y), shorted.contracted())
    }
}

/// A network with a vertex set contracted to one node.
///
/// The contracted node takes the position of the smallest member of the
/// set; remaining vertices keep their relative order. Edges inside the set
/// disappear and parallel edges into the set merge by adding conductances.
#[derive(Debug, Clone)]
pub struct Shorted {
    network: Network,
    image: Vec<Vertex>,
    contracted: Vertex,
}

impl Shorted {
    fn new(net: &Network, set: &[Vertex]) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::domain("shorted set must be nonempty"));
        }
        for &v in set {
            net.check_vertex(v)?;
        }
        let members: BTreeSet<Vertex> = set.iter().copied().collect();
        let first = *members.iter().next().unwrap();
        let mut image = vec![0; net.len()];
        let mut labels = Vec::new();
        let mut contracted = 0;
        for v in 0..net.len() {
            if members.contains(&v) {
                if v == first {
                    contracted = labels.len();
                    labels.push(
                        members
                            .iter()
                            .map(|&m| net.label(m))
                            .collect::<Vec<_>>()
                            .join("+"),
                    );
                }
                image[v] = contracted;
            } else {
                image[v] = labels.len();
                labels.push(net.label(v).to_string());
            }
        }
        let edges: Vec<_> = net
            .edges()
            .iter()
            .filter(|e| image[e.u] != image[e.v])
            .map(|e| (image[e.u], image[e.v], e.conductance))
            .collect();
        Ok(Shorted {
            network: Network::new(labels, &edges)?,
            image,
            contracted,
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    /// Vertex of the contracted network that `v` maps to.
    pub fn image(&self, v: Vertex) -> Vertex {
        self.image[v]
    }

    /// The vertex that the shorted set became.
    pub fn contracted(&self) -> Vertex {
        self.contracted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Network {
        Network::unlabeled(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    fn path(k: usize) -> Network {
        let edges: Vec<_> = (0..k).map(|i| (i, i + 1, 1.0)).collect();
        Network::unlabeled(k + 1, &edges).unwrap()
    }

    #[test]
    fn single_edge_resistance_is_inverse_conductance() {
        let net = Network::unlabeled(2, &[(0, 1, 4.0)]).unwrap();
        assert_close!(net.effective_resistance(0, 1).unwrap(), 0.25, 1e-15);
        assert_eq!(net.effective_resistance(1, 1).unwrap(), 0.0);
    }

    #[test]
    fn series_path() {
        for k in 1..8 {
            assert_close!(path(k).effective_resistance(0, k).unwrap(), k as f64, 1e-12);
        }
    }

    #[test]
    fn triangle_corners() {
        assert_close!(triangle().effective_resistance(0, 2).unwrap(), 2.0 / 3.0, 1e-15);
        let r = triangle().resistance_matrix();
        for i in 0..3 {
            assert_eq!(r.get(i, i), 0.0);
            for j in 0..3 {
                if i != j {
                    assert_close!(r.get(i, j), 2.0 / 3.0, 1e-14);
                }
            }
        }
    }

    #[test]
    fn single_edge_matrix() {
        let r = Network::unlabeled(2, &[(0, 1, 1.0)]).unwrap().resistance_matrix();
        assert_eq!(r.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn harmonic_potential_boundary_values() {
        let h = path(4).harmonic_potential(0, 4).unwrap();
        for (i, v) in h.iter().enumerate() {
            assert_close!(*v, 1.0 - i as f64 / 4.0, 1e-14);
        }
    }

    #[test]
    fn shorting_singleton_changes_nothing() {
        let net = path(3);
        let r = net.effective_resistance(1, 3).unwrap();
        assert_close!(net.shorted_resistance(&[3], 1, 3).unwrap(), r, 1e-14);
    }

    #[test]
    fn shorting_path_ends_gives_parallel_pair() {
        assert_close!(path(2).shorted_resistance(&[0, 2], 0, 1).unwrap(), 0.5, 1e-15);
    }

    #[test]
    fn shorted_pair_inside_set_is_zero() {
        assert_eq!(path(3).shorted_resistance(&[0, 2], 0, 2).unwrap(), 0.0);
    }

    #[test]
    fn shorting_empty_set_is_domain_error() {
        assert!(matches!(path(2).shorted_resistance(&[], 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn resistance_to_set_on_path() {
        // two 2-ohm branches in parallel
        assert_close!(path(4).resistance_to_set(2, &[0, 4]).unwrap(), 1.0, 1e-14);
    }

    #[test]
    fn single_vertex_matrix_is_zero() {
        let r = Network::unlabeled(1, &[]).unwrap().resistance_matrix();
        assert_eq!(r.len(), 1);
        assert_eq!(r.get(0, 0), 0.0);
    }

    #[test]
    fn matrix_validation() {
        let bad_diag = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        assert!(ResistanceMatrix::unlabeled(bad_diag).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(ResistanceMatrix::unlabeled(asym).is_err());
        let zero = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.0]);
        assert!(ResistanceMatrix::unlabeled(zero).is_err());
    }
}
