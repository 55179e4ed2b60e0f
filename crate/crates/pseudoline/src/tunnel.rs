//! Tunnel decompositions: faces grouped into bands of `w` consecutive
//! levels, edges classified as wall or tunnel edges, faces as good or bad.
//!
//! The standard grouping puts level `j` into tunnel `j / w`. The long-path
//! pipeline uses tunnels of width 2 shifted by one level (grouping `{0}`,
//! `{1,2}`, `{3,4}`, ...) so that the endpoints of each tunnel path lie in
//! the tunnel they traverse; the `offset` field selects the grouping.
//!
//! A face is bad when all its vertices lie on one wall; bad faces have
//! exactly one tunnel edge and hang off the tunnel's caterpillar backbone
//! as leaves. Faces with no wall edge or no tunnel edge (the bottom and top
//! faces in degenerate positions, or every face when `w = n+1`) are good.

use crate::error::{Error, Result};
use crate::plane::{EdgeId, FaceId, PlaneGraph, VertexId};

#[derive(Clone, Debug)]
pub struct Wall {
    /// Edge level shared by all edges of this wall.
    pub level: usize,
    /// Wall edges left to right.
    pub edges: Vec<EdgeId>,
    /// Interior vertices left to right (`vertices[i]` joins `edges[i]` and
    /// `edges[i+1]`).
    pub vertices: Vec<VertexId>,
}

#[derive(Clone, Debug)]
pub struct TunnelDecomposition {
    pub w: usize,
    pub offset: usize,
    pub tunnel_count: usize,
    /// Level -> tunnel index.
    pub tunnel_of_level: Vec<usize>,
    /// Faces per tunnel, ascending face id.
    pub tunnels: Vec<Vec<FaceId>>,
    /// Wall `t` separates tunnels `t` and `t+1`.
    pub walls: Vec<Wall>,
    /// Edge -> wall index, `None` for tunnel edges.
    pub wall_of_edge: Vec<Option<usize>>,
    /// Edge -> position in its wall's left-to-right order.
    pub wall_pos: Vec<Option<usize>>,
    /// Vertex -> the wall it lies on (for `w >= 2` every vertex lies on
    /// exactly one wall; for `w = 1` the lower of the two).
    pub vertex_wall: Vec<Option<usize>>,
    /// Face -> its wall edges in wall order.
    pub face_wall_edges: Vec<Vec<EdgeId>>,
    /// Face -> its tunnel edges (ascending edge id).
    pub face_tunnel_edges: Vec<Vec<EdgeId>>,
    /// Face -> the wall carrying its wall edges.
    pub face_wall: Vec<Option<usize>>,
    pub bad: Vec<bool>,
    /// Tunnel neighbor of each bad face.
    pub tnb: Vec<Option<FaceId>>,
}

impl TunnelDecomposition {
    /// Standard grouping: tunnel `i` is the union of levels `iw..(i+1)w-1`.
    pub fn new(g: &PlaneGraph, w: usize) -> Result<Self> {
        Self::with_offset(g, w, 0)
    }

    /// Grouping with a phase shift: level `j` goes to tunnel `(j+offset)/w`.
    pub fn with_offset(g: &PlaneGraph, w: usize, offset: usize) -> Result<Self> {
        if w < 1 || w > g.n + 1 {
            return Err(Error::BadWidth { w, n: g.n });
        }
        if offset >= w {
            return Err(Error::BadParameter(format!("offset {offset} must be < w {w}")));
        }
        let tunnel_of_level: Vec<usize> = (0..=g.n).map(|j| (j + offset) / w).collect();
        let tunnel_count = tunnel_of_level[g.n] + 1;

        let mut tunnels = vec![Vec::new(); tunnel_count];
        for (f, face) in g.faces.iter().enumerate() {
            tunnels[tunnel_of_level[face.level]].push(f);
        }

        // Wall edges separate faces of different tunnels; the wall index is
        // the tunnel of the lower face. Each wall is the x-monotone curve
        // formed by the edges of a single level.
        let mut wall_of_edge = vec![None; g.edges.len()];
        let mut wall_levels: Vec<usize> = Vec::new();
        for (e, edge) in g.edges.iter().enumerate() {
            let t_lo = tunnel_of_level[edge.level];
            let t_hi = tunnel_of_level[edge.level + 1];
            if t_lo != t_hi {
                debug_assert_eq!(t_hi, t_lo + 1);
                wall_of_edge[e] = Some(t_lo);
                if !wall_levels.contains(&edge.level) {
                    wall_levels.push(edge.level);
                }
            }
        }
        wall_levels.sort_unstable();
        let mut walls: Vec<Wall> = wall_levels
            .iter()
            .map(|&lvl| Wall {
                level: lvl,
                edges: Vec::new(),
                vertices: Vec::new(),
            })
            .collect();
        // Wall index by tunnel-of-lower-face equals position in sorted
        // level list; sanity-check the correspondence.
        for (wi, wall) in walls.iter().enumerate() {
            let t = tunnel_of_level[wall.level];
            if t != wi {
                return Err(Error::internal(format!(
                    "wall {wi} at level {} maps to tunnel {t}",
                    wall.level
                )));
            }
        }
        let mut wall_pos = vec![None; g.edges.len()];
        for (e, &wall) in wall_of_edge.iter().enumerate() {
            if let Some(wi) = wall {
                walls[wi].edges.push(e);
            }
        }
        for (wi, wall) in walls.iter_mut().enumerate() {
            // Left-to-right order along the level curve: by the sweep index
            // of the left endpoint, the unbounded-left edge first.
            wall.edges
                .sort_unstable_by_key(|&e| g.edges[e].left.map(|v| v as i64).unwrap_or(-1));
            for (pos, &e) in wall.edges.iter().enumerate() {
                wall_pos[e] = Some(pos);
            }
            for pair in wall.edges.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                if g.edges[a].right != g.edges[b].left || g.edges[a].right.is_none() {
                    return Err(Error::internal(format!(
                        "wall {wi} edges {a},{b} are not consecutive on the level curve"
                    )));
                }
                wall.vertices.push(g.edges[a].right.unwrap());
            }
        }

        let mut vertex_wall = vec![None; g.vertices.len()];
        for (v, vert) in g.vertices.iter().enumerate() {
            for &e in &vert.edges {
                if let Some(wi) = wall_of_edge[e] {
                    vertex_wall[v] = Some(wi);
                    break;
                }
            }
        }

        let mut face_wall_edges = vec![Vec::new(); g.faces.len()];
        let mut face_tunnel_edges = vec![Vec::new(); g.faces.len()];
        for (e, edge) in g.edges.iter().enumerate() {
            if wall_of_edge[e].is_some() {
                face_wall_edges[edge.below].push(e);
                face_wall_edges[edge.above].push(e);
            } else {
                face_tunnel_edges[edge.below].push(e);
                face_tunnel_edges[edge.above].push(e);
            }
        }
        let mut face_wall = vec![None; g.faces.len()];
        for f in 0..g.faces.len() {
            face_wall_edges[f].sort_unstable_by_key(|&e| wall_pos[e]);
            face_tunnel_edges[f].sort_unstable();
            if let Some(&e0) = face_wall_edges[f].first() {
                let wi = wall_of_edge[e0].unwrap();
                for &e in &face_wall_edges[f] {
                    if wall_of_edge[e] != Some(wi) {
                        return Err(Error::internal(format!(
                            "face {f} has wall edges on two walls"
                        )));
                    }
                }
                face_wall[f] = Some(wi);
            }
        }

        // Good/bad classification: bad iff the face has both edge kinds and
        // all its vertices lie on one common wall.
        let mut bad = vec![false; g.faces.len()];
        let mut tnb = vec![None; g.faces.len()];
        for f in 0..g.faces.len() {
            if face_wall_edges[f].is_empty() || face_tunnel_edges[f].is_empty() {
                continue;
            }
            let vs = g.face_vertices(f);
            if vs.is_empty() {
                continue;
            }
            let first = vertex_wall[vs[0]];
            if first.is_some() && vs.iter().all(|&v| vertex_wall[v] == first) {
                bad[f] = true;
                if face_tunnel_edges[f].len() != 1 {
                    return Err(Error::internal(format!(
                        "bad face {f} has {} tunnel edges",
                        face_tunnel_edges[f].len()
                    )));
                }
                tnb[f] = Some(g.edges[face_tunnel_edges[f][0]].other_face(f));
            }
        }

        Ok(TunnelDecomposition {
            w,
            offset,
            tunnel_count,
            tunnel_of_level,
            tunnels,
            walls,
            wall_of_edge,
            wall_pos,
            vertex_wall,
            face_wall_edges,
            face_tunnel_edges,
            face_wall,
            bad,
            tnb,
        })
    }

    pub fn tunnel_of_face(&self, g: &PlaneGraph, f: FaceId) -> usize {
        self.tunnel_of_level[g.faces[f].level]
    }

    pub fn is_wall_edge(&self, e: EdgeId) -> bool {
        self.wall_of_edge[e].is_some()
    }

    /// Position of the leftmost wall edge of `f`, used to order faces along
    /// their wall.
    pub fn leftmost_wall_pos(&self, f: FaceId) -> Option<usize> {
        self.face_wall_edges[f].first().and_then(|&e| self.wall_pos[e])
    }

    /// Wall neighbors of `f` in wall order, deduplicated (a neighbor
    /// sharing several consecutive wall edges appears once).
    pub fn wall_neighbors(&self, g: &PlaneGraph, f: FaceId) -> Vec<FaceId> {
        let mut out: Vec<FaceId> = Vec::new();
        for &e in &self.face_wall_edges[f] {
            let nb = g.edges[e].other_face(f);
            if out.last() != Some(&nb) {
                out.push(nb);
            }
        }
        out
    }

    /// Within-tunnel dual adjacency of a face: neighbors across its tunnel
    /// edges.
    pub fn tunnel_neighbors(&self, g: &PlaneGraph, f: FaceId) -> Vec<(FaceId, EdgeId)> {
        self.face_tunnel_edges[f]
            .iter()
            .map(|&e| (g.edges[e].other_face(f), e))
            .collect()
    }
}

/// Structural report for one tunnel: checks the caterpillar shape and the
/// good/bad classification against the leaf characterization.
pub fn check_tunnel_caterpillar(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    tunnel: usize,
) -> Result<()> {
    let faces = &td.tunnels[tunnel];
    let index: std::collections::BTreeMap<FaceId, usize> =
        faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut degree = vec![0usize; faces.len()];
    let mut edge_count = 0;
    for &f in faces {
        for (nb, _) in td.tunnel_neighbors(g, f) {
            if td.tunnel_of_face(g, nb) == tunnel {
                degree[index[&f]] += 1;
                if nb > f {
                    edge_count += 1;
                }
            }
        }
    }
    if edge_count + 1 != faces.len() {
        return Err(Error::internal(format!(
            "tunnel {tunnel}: {edge_count} internal arcs for {} faces (not a tree)",
            faces.len()
        )));
    }
    // Connectivity: BFS from the first face.
    let mut seen = vec![false; faces.len()];
    let mut queue = vec![0usize];
    seen[0] = true;
    while let Some(i) = queue.pop() {
        for (nb, _) in td.tunnel_neighbors(g, faces[i]) {
            if let Some(&j) = index.get(&nb) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::internal(format!("tunnel {tunnel} is disconnected")));
    }
    for (i, &f) in faces.iter().enumerate() {
        if td.bad[f] {
            // Bad faces are leaves with a good tunnel neighbor.
            if degree[i] != 1 {
                return Err(Error::internal(format!(
                    "bad face {f} has in-tunnel degree {}",
                    degree[i]
                )));
            }
            let t = td.tnb[f].unwrap();
            if td.bad[t] {
                return Err(Error::internal(format!(
                    "bad face {f} has bad tunnel neighbor {t}"
                )));
            }
        }
    }
    // Good faces form a path: within the subgraph induced on good faces,
    // degrees are at most 2 and the subgraph is connected.
    let good: Vec<FaceId> = faces.iter().copied().filter(|&f| !td.bad[f]).collect();
    let good_set: std::collections::BTreeSet<FaceId> = good.iter().copied().collect();
    let mut good_deg = Vec::with_capacity(good.len());
    for &f in &good {
        let d = td
            .tunnel_neighbors(g, f)
            .iter()
            .filter(|(nb, _)| good_set.contains(nb))
            .count();
        good_deg.push(d);
        if d > 2 {
            return Err(Error::internal(format!(
                "good face {f} has {d} good in-tunnel neighbors (backbone not a path)"
            )));
        }
    }
    if !good.is_empty() {
        let mut seen_good: std::collections::BTreeSet<FaceId> = [good[0]].into();
        let mut stack = vec![good[0]];
        while let Some(f) = stack.pop() {
            for (nb, _) in td.tunnel_neighbors(g, f) {
                if good_set.contains(&nb) && seen_good.insert(nb) {
                    stack.push(nb);
                }
            }
        }
        if seen_good.len() != good.len() {
            return Err(Error::internal(format!(
                "tunnel {tunnel}: good faces do not form a connected backbone"
            )));
        }
    }
    // Alternation along the backbone: consecutive good faces with wall
    // edges have them on different walls.
    for &f in &good {
        for (nb, _) in td.tunnel_neighbors(g, f) {
            if good_set.contains(&nb) && nb > f {
                if let (Some(a), Some(b)) = (td.face_wall[f], td.face_wall[nb]) {
                    if a == b {
                        return Err(Error::internal(format!(
                            "backbone faces {f},{nb} have wall edges on the same wall"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Nestedness test: `f` is nested in `h` when all wall edges of `f` are
/// also wall edges of `h`.
pub fn is_nested(td: &TunnelDecomposition, g: &PlaneGraph, f: FaceId, h: FaceId) -> bool {
    !td.face_wall_edges[f].is_empty()
        && td.face_wall_edges[f]
            .iter()
            .all(|&e| g.edges[e].below == h || g.edges[e].above == h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiring::{gen_random_wiring, WiringDiagram};

    #[test]
    fn single_tunnel_has_no_walls() {
        let g = PlaneGraph::build(&gen_random_wiring(5, 2)).unwrap();
        let td = TunnelDecomposition::new(&g, 6).unwrap();
        assert_eq!(td.tunnel_count, 1);
        assert!(td.walls.is_empty());
        assert!(td.bad.iter().all(|&b| !b));
    }

    #[test]
    fn four_lines_width_two_levels() {
        let g = PlaneGraph::build(&WiringDiagram::new(4, vec![1, 3, 2, 1, 3, 2]).unwrap()).unwrap();
        let td = TunnelDecomposition::new(&g, 2).unwrap();
        assert_eq!(td.tunnel_count, 3);
        for (f, face) in g.faces.iter().enumerate() {
            let expected = face.level / 2;
            assert_eq!(td.tunnel_of_face(&g, f), expected);
        }
        // Wall edges are exactly the edges whose faces lie in different
        // tunnels.
        for (e, edge) in g.edges.iter().enumerate() {
            let diff = g.faces[edge.below].level / 2 != g.faces[edge.above].level / 2;
            assert_eq!(td.is_wall_edge(e), diff);
        }
    }

    #[test]
    fn caterpillar_structure_on_random_diagrams() {
        for seed in 0..20 {
            for n in 2..9 {
                let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
                for offset in 0..2 {
                    let td = TunnelDecomposition::with_offset(&g, 2, offset).unwrap();
                    for t in 0..td.tunnel_count {
                        check_tunnel_caterpillar(&g, &td, t)
                            .unwrap_or_else(|e| panic!("n={n} seed={seed} offset={offset}: {e}"));
                    }
                }
            }
        }
    }

    #[test]
    fn bad_faces_are_never_nested_in_another_face() {
        for seed in 0..10 {
            let g = PlaneGraph::build(&gen_random_wiring(7, seed)).unwrap();
            let td = TunnelDecomposition::new(&g, 2).unwrap();
            for f in 0..g.faces.len() {
                if td.bad[f] && g.faces[f].is_bounded() {
                    for h in 0..g.faces.len() {
                        if h != f {
                            assert!(
                                !is_nested(&td, &g, f, h),
                                "bounded bad face {f} nested in {h} (seed {seed})"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn last_tunnel_is_smaller_when_w_does_not_divide() {
        let g = PlaneGraph::build(&gen_random_wiring(5, 4)).unwrap();
        // n+1 = 6 levels, w = 4: tunnels of 4 and 2 levels.
        let td = TunnelDecomposition::new(&g, 4).unwrap();
        assert_eq!(td.tunnel_count, 2);
        let sizes: Vec<usize> = (0..=5).map(|l| td.tunnel_of_level[l]).collect();
        assert_eq!(sizes, vec![0, 0, 0, 0, 1, 1]);
    }
}
