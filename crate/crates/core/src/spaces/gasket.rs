use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::network::{Network, Vertex};

/// Level-`n` Sierpinski gasket graph with unit conductances.
///
/// Vertices carry labels `a_b` from the triangular lattice coordinates
/// `(a, b)` with corners `(0,0)`, `(2ⁿ,0)`, `(0,2ⁿ)`. The corners are always
/// vertices 0, 1 and 2; the rest follow in recursive construction order.
#[derive(Debug, Clone)]
pub struct GasketGraph {
    pub level: u32,
    pub net: Network,
    pub corners: [Vertex; 3],
    /// Planar positions in the unit equilateral triangle.
    pub coords: Vec<(f64, f64)>,
}

/// Largest level accepted by [`gasket_graph`].
pub const MAX_GASKET_LEVEL: u32 = 12;

pub fn gasket_vertex_count(level: u32) -> usize {
    3 * (3usize.pow(level) + 1) / 2
}

pub fn gasket_edge_count(level: u32) -> usize {
    3usize.pow(level + 1)
}

struct Builder {
    index: HashMap<(u64, u64), Vertex>,
    lattice: Vec<(u64, u64)>,
    edges: Vec<(Vertex, Vertex, f64)>,
}

impl Builder {
    fn vertex(&mut self, p: (u64, u64)) -> Vertex {
        if let Some(&v) = self.index.get(&p) {
            return v;
        }
        let v = self.lattice.len();
        self.lattice.push(p);
        self.index.insert(p, v);
        v
    }

    /// Emits the level-`level` gasket with lower-left corner `(a, b)`.
    fn glue(&mut self, level: u32, a: u64, b: u64) {
        if level == 0 {
            let p = self.vertex((a, b));
            let q = self.vertex((a + 1, b));
            let r = self.vertex((a, b + 1));
            self.edges.extend([(p, q, 1.0), (q, r, 1.0), (p, r, 1.0)]);
            return;
        }
        let half = 1u64 << (level - 1);
        self.glue(level - 1, a, b);
        self.glue(level - 1, a + half, b);
        self.glue(level - 1, a, b + half);
    }
}

/// Builds the level-`level` gasket by gluing three copies of level `level - 1`
/// at their corners.
pub fn gasket_graph(level: u32) -> Result<GasketGraph> {
    if level > MAX_GASKET_LEVEL {
        return Err(Error::Capacity {
            what: "gasket level",
            size: level as usize,
            limit: MAX_GASKET_LEVEL as usize,
        });
    }
    let side = 1u64 << level;
    let mut b = Builder {
        index: HashMap::new(),
        lattice: Vec::with_capacity(gasket_vertex_count(level)),
        edges: Vec::with_capacity(gasket_edge_count(level)),
    };
    let corners = [b.vertex((0, 0)), b.vertex((side, 0)), b.vertex((0, side))];
    b.glue(level, 0, 0);
    let labels = b.lattice.iter().map(|(a, c)| format!("{a}_{c}")).collect();
    let scale = 1.0 / side as f64;
    let coords = b
        .lattice
        .iter()
        .map(|&(a, c)| {
            let (a, c) = (a as f64 * scale, c as f64 * scale);
            (a + c / 2.0, c * 3f64.sqrt() / 2.0)
        })
        .collect();
    Ok(GasketGraph {
        level,
        net: Network::new(labels, &b.edges)?,
        corners,
        coords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels() {
        let g0 = gasket_graph(0).unwrap();
        assert_eq!(g0.net.len(), 3);
        assert_eq!(g0.net.edges().len(), 3);
        assert_eq!(gasket_graph(1).unwrap().net.len(), 6);
        assert_eq!(gasket_graph(2).unwrap().net.len(), 15);
    }

    #[test]
    fn closed_form_counts() {
        for level in 0..=7 {
            let g = gasket_graph(level).unwrap();
            assert_eq!(g.net.len(), gasket_vertex_count(level));
            assert_eq!(g.net.edges().len(), gasket_edge_count(level));
            for c in g.corners {
                assert_eq!(g.net.neighbors(c).len(), 2);
            }
            // every non-corner vertex has degree 4
            let fours = (0..g.net.len()).filter(|&v| g.net.neighbors(v).len() == 4).count();
            assert_eq!(fours, g.net.len() - 3);
        }
    }

    #[test]
    fn corners_are_canonical() {
        let g = gasket_graph(3).unwrap();
        assert_eq!(g.corners, [0, 1, 2]);
        assert_eq!(g.net.labels()[..3], ["0_0", "8_0", "0_8"]);
        assert_close!(g.coords[1].0, 1.0, 1e-15);
        assert_close!(g.coords[2].1, 3f64.sqrt() / 2.0, 1e-15);
    }

    #[test]
    fn corner_resistance_renormalizes() {
        let mut prev = None;
        for level in 0..=5 {
            let g = gasket_graph(level).unwrap();
            let r = g.net.effective_resistance(g.corners[0], g.corners[1]).unwrap();
            if level == 0 {
                assert_close!(r, 2.0 / 3.0, 1e-12);
            }
            if let Some(p) = prev {
                assert_close!(r / p, 5.0 / 3.0, 1e-9);
            }
            prev = Some(r);
        }
    }

    #[test]
    fn too_deep_is_capacity_error() {
        assert!(matches!(gasket_graph(13), Err(Error::Capacity { .. })));
    }
}
