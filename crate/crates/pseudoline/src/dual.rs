//! Dual graph of the plane graph: one node per face, one arc per
//! arrangement edge. Two faces sharing several edges get several arcs.

use crate::error::{Error, Result};
use crate::plane::{EdgeId, FaceId, PlaneGraph};

#[derive(Clone, Debug)]
pub struct DualGraph {
    /// `adj[f]` lists `(neighbor, separating edge)` sorted by edge id.
    pub adj: Vec<Vec<(FaceId, EdgeId)>>,
    pub arc_count: usize,
}

impl DualGraph {
    pub fn build(g: &PlaneGraph) -> Self {
        let mut adj = vec![Vec::new(); g.faces.len()];
        for (e, edge) in g.edges.iter().enumerate() {
            adj[edge.below].push((edge.above, e));
            adj[edge.above].push((edge.below, e));
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(_, e)| e);
        }
        DualGraph {
            adj,
            arc_count: g.edges.len(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, f: FaceId) -> &[(FaceId, EdgeId)] {
        &self.adj[f]
    }

    /// Checks that level parity is a proper 2-coloring: every arc connects
    /// faces whose levels differ by exactly one.
    pub fn check_bipartite_by_level(&self, g: &PlaneGraph) -> Result<()> {
        for (f, list) in self.adj.iter().enumerate() {
            for &(nb, e) in list {
                let (a, b) = (g.faces[f].level, g.faces[nb].level);
                if a.abs_diff(b) != 1 {
                    return Err(Error::internal(format!(
                        "arc over edge {e} connects levels {a} and {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiring::WiringDiagram;

    #[test]
    fn single_line_dual() {
        let g = PlaneGraph::build(&WiringDiagram::new(1, vec![]).unwrap()).unwrap();
        let d = DualGraph::build(&g);
        assert_eq!(d.node_count(), 2);
        assert_eq!(d.arc_count, 1);
    }

    #[test]
    fn two_lines_dual_is_a_four_cycle() {
        // Hand enumeration: the four faces around a single crossing form a
        // 4-cycle in the dual.
        let g = PlaneGraph::build(&WiringDiagram::new(2, vec![1]).unwrap()).unwrap();
        let d = DualGraph::build(&g);
        assert_eq!(d.node_count(), 4);
        assert_eq!(d.arc_count, 4);
        for f in 0..4 {
            assert_eq!(d.neighbors(f).len(), 2);
        }
        d.check_bipartite_by_level(&g).unwrap();
    }

    #[test]
    fn four_lines_dual_counts() {
        let g =
            PlaneGraph::build(&WiringDiagram::new(4, vec![2, 1, 3, 2, 1, 3]).unwrap()).unwrap();
        let d = DualGraph::build(&g);
        assert_eq!(d.node_count(), 11);
        assert_eq!(d.arc_count, 16);
        d.check_bipartite_by_level(&g).unwrap();
    }
}
