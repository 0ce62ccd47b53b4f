//! Finite-space calculus of resistance metrics and resistance forms.
//!
//! The crate covers weighted networks and their effective resistance, the
//! reconstruction of conductances from a resistance matrix, exact simulation
//! of the associated continuous-time random walks, resolvent kernels of
//! killed walks, generators for standard example spaces, metric-measure
//! comparisons, and a registry of reproducible experiments.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        let tol: f64 = $tol;
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol:e})");
    }};
}

pub mod compare;
pub mod error;
pub mod experiments;
pub mod io;
pub mod network;
pub mod numeric;
pub mod resolvent;
pub mod rng;
pub mod spaces;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use network::{Network, ResistanceMatrix, Vertex, VertexMeasure};
pub use rng::RandomSeed;
