//! Generators for example spaces: Sierpinski gasket graphs, interval
//! discretizations, critical Galton-Watson trees, critical Erdős–Rényi
//! components and heavy-tailed conductance decorations.

mod gasket;
mod interval;
mod mm_space;
mod random_graph;
mod trees;

pub use gasket::{
    gasket_edge_count, gasket_graph, gasket_vertex_count, GasketGraph, MAX_GASKET_LEVEL,
};
pub use interval::{alpha_interval_metric, alpha_interval_space, path_graph};
pub use mm_space::{as_mm_space, FiniteMMSpace};
pub use random_graph::{
    er_giant_component, heavy_tailed_conductances, random_network, sample_pareto,
};
pub use trees::{
    gw_tree, gw_tree_with_budget, offspring_law, FinitePmf, GeometricHalf, OffspringLaw,
    PoissonOne, TreeGraph, MAX_ATTEMPTS,
};
