//! Plane graph of a pseudoline arrangement, built by a left-to-right sweep
//! over the wiring diagram.
//!
//! Face ids are deterministic: the `n+1` leftmost gap faces get ids `0..=n`
//! bottom to top (so id `j` is the left unbounded face of level `j`), then
//! each crossing opens exactly one new face, in crossing order.
//!
//! Levels count pseudolines strictly below: a face of level `j` lies above
//! exactly `j` pseudolines, an edge of level `j` separates a face of level
//! `j` from one of level `j+1`, and a vertex of level `j` has two incident
//! edges of level `j` and two of level `j+1`.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::wiring::WiringDiagram;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type FaceId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Bounded,
    LeftUnbounded,
    RightUnbounded,
    Bottom,
    Top,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    /// The two pseudolines crossing here, `(lower_before, upper_before)`.
    pub lines: (usize, usize),
    /// Gap index of the crossing, in `1..=n-1`.
    pub gap: usize,
    /// Pseudolines strictly below the crossing point.
    pub level: usize,
    /// Incident edges in rotation order: west-low, west-high, east-high,
    /// east-low. They alternate between the two crossing pseudolines.
    pub edges: [EdgeId; 4],
    /// Incident faces: south, west, north, east.
    pub faces: [FaceId; 4],
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub line: usize,
    pub level: usize,
    pub below: FaceId,
    pub above: FaceId,
    /// `None` means unbounded towards x = -inf.
    pub left: Option<VertexId>,
    /// `None` means unbounded towards x = +inf.
    pub right: Option<VertexId>,
}

impl Edge {
    pub fn faces(&self) -> (FaceId, FaceId) {
        (self.below, self.above)
    }

    pub fn other_face(&self, f: FaceId) -> FaceId {
        if self.below == f {
            self.above
        } else {
            self.below
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.left.is_none() || self.right.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Face {
    pub level: usize,
    pub side: Side,
    /// Boundary edges below the face, left to right.
    pub lower: Vec<EdgeId>,
    /// Boundary edges above the face, left to right.
    pub upper: Vec<EdgeId>,
    /// Crossing that opened the face (`None` for the initial gap faces).
    pub left_vertex: Option<VertexId>,
    /// Crossing that closed the face (`None` for right-open faces).
    pub right_vertex: Option<VertexId>,
    /// Pseudolines strictly below the face.
    pub below_lines: BitSet,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.lower.len() + self.upper.len()
    }

    pub fn is_bounded(&self) -> bool {
        self.side == Side::Bounded
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.lower.iter().chain(self.upper.iter()).copied()
    }
}

#[derive(Clone, Debug)]
pub struct PlaneGraph {
    pub n: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    /// Left unbounded face per level (`left_unbounded[0]` is the bottom
    /// face, `left_unbounded[n]` the top face).
    pub left_unbounded: Vec<FaceId>,
    /// Right unbounded face per level, with the same two identifications.
    pub right_unbounded: Vec<FaceId>,
    /// `right_edges[p]` is the unbounded edge at height `p+1` on the right,
    /// separating `right_unbounded[p]` from `right_unbounded[p+1]`.
    pub right_edges: Vec<EdgeId>,
    full: bool,
}

impl PlaneGraph {
    pub fn build(d: &WiringDiagram) -> Result<Self> {
        if !d.is_full() {
            return Err(Error::NotFullArrangement(format!(
                "{} crossings, expected {}",
                d.crossings().len(),
                d.n() * (d.n() - 1) / 2
            )));
        }
        Self::build_impl(d)
    }

    /// Builds the plane graph of a partial diagram. Counting identities do
    /// not hold here; only the renderer should rely on this.
    pub fn build_permissive(d: &WiringDiagram) -> Result<Self> {
        Self::build_impl(d)
    }

    fn build_impl(d: &WiringDiagram) -> Result<Self> {
        let n = d.n();
        let mut faces: Vec<Face> = (0..=n)
            .map(|gap| {
                let mut below = BitSet::new(n);
                for line in 0..gap {
                    below.insert(line);
                }
                Face {
                    level: gap,
                    side: if gap == 0 {
                        Side::Bottom
                    } else if gap == n {
                        Side::Top
                    } else {
                        Side::LeftUnbounded
                    },
                    lower: Vec::new(),
                    upper: Vec::new(),
                    left_vertex: None,
                    right_vertex: None,
                    below_lines: below,
                }
            })
            .collect();
        let mut edges: Vec<Edge> = Vec::with_capacity(n * n);
        let mut vertices: Vec<Vertex> = Vec::with_capacity(d.crossings().len());

        // Sweep state. `order[p]` is the pseudoline at height p+1,
        // `open_face[g]` the current face in gap g, `open_edge[p]` the
        // current edge at height p+1.
        let mut order: Vec<usize> = (0..n).collect();
        let mut open_face: Vec<FaceId> = (0..=n).collect();
        let mut open_edge: Vec<EdgeId> = Vec::with_capacity(n);
        for p in 0..n {
            let id = edges.len();
            edges.push(Edge {
                line: order[p],
                level: p,
                below: open_face[p],
                above: open_face[p + 1],
                left: None,
                right: None,
            });
            faces[open_face[p]].upper.push(id);
            faces[open_face[p + 1]].lower.push(id);
            open_edge.push(id);
        }

        for &g in d.crossings() {
            let v = vertices.len();
            let (a, b) = (order[g - 1], order[g]);
            let (in_low, in_high) = (open_edge[g - 1], open_edge[g]);
            let south = open_face[g - 1];
            let west = open_face[g];
            let north = open_face[g + 1];

            edges[in_low].right = Some(v);
            edges[in_high].right = Some(v);
            faces[west].right_vertex = Some(v);

            // The face opened east of the crossing.
            let east = faces.len();
            let mut below = faces[west].below_lines.clone();
            below.remove(a);
            below.insert(b);
            faces.push(Face {
                level: g,
                side: Side::Bounded,
                lower: Vec::new(),
                upper: Vec::new(),
                left_vertex: Some(v),
                right_vertex: None,
                below_lines: below,
            });

            // Two outgoing edges: line b continues at height g, line a at
            // height g+1.
            let out_low = edges.len();
            edges.push(Edge {
                line: b,
                level: g - 1,
                below: south,
                above: east,
                left: Some(v),
                right: None,
            });
            faces[south].upper.push(out_low);
            faces[east].lower.push(out_low);
            let out_high = edges.len();
            edges.push(Edge {
                line: a,
                level: g,
                below: east,
                above: north,
                left: Some(v),
                right: None,
            });
            faces[east].upper.push(out_high);
            faces[north].lower.push(out_high);

            vertices.push(Vertex {
                lines: (a, b),
                gap: g,
                level: g - 1,
                edges: [in_low, in_high, out_high, out_low],
                faces: [south, west, north, east],
            });

            order.swap(g - 1, g);
            open_face[g] = east;
            open_edge[g - 1] = out_low;
            open_edge[g] = out_high;
        }

        // Faces still open on the right.
        for (gap, &f) in open_face.iter().enumerate() {
            if gap != 0 && gap != n && faces[f].side == Side::Bounded {
                faces[f].side = Side::RightUnbounded;
            }
        }
        let right_unbounded = open_face.clone();
        let right_edges = open_edge.clone();

        let g = PlaneGraph {
            n,
            vertices,
            edges,
            faces,
            left_unbounded: (0..=n).collect(),
            right_unbounded,
            right_edges,
            full: d.is_full(),
        };
        if g.full {
            g.check_counts()?;
        }
        Ok(g)
    }

    fn check_counts(&self) -> Result<()> {
        let n = self.n;
        let expect = [
            (self.vertices.len(), n * (n - 1) / 2, "vertices"),
            (self.edges.len(), n * n, "edges"),
            (self.faces.len(), n * (n - 1) / 2 + n + 1, "faces"),
            (self.unbounded_faces().count(), 2 * n, "unbounded faces"),
        ];
        for (got, want, what) in expect {
            if got != want {
                return Err(Error::internal(format!("{what}: got {got}, want {want}")));
            }
        }
        Ok(())
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn face(&self, f: FaceId) -> Result<&Face> {
        self.faces.get(f).ok_or(Error::UnknownFace(f))
    }

    pub fn face_level(&self, f: FaceId) -> Result<usize> {
        Ok(self.face(f)?.level)
    }

    pub fn unbounded_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.faces
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_bounded())
            .map(|(i, _)| i)
    }

    pub fn bottom_face(&self) -> FaceId {
        0
    }

    pub fn top_face(&self) -> FaceId {
        self.n
    }

    /// The unbounded face `l_i` or `r_i`. For levels `0` and `n` both sides
    /// resolve to the bottom and top face respectively.
    pub fn unbounded_face(&self, side: UnboundedSide, level: usize) -> Result<FaceId> {
        if level > self.n {
            return Err(Error::BadLevel { level, n: self.n });
        }
        Ok(match side {
            UnboundedSide::Left => self.left_unbounded[level],
            UnboundedSide::Right => self.right_unbounded[level],
        })
    }

    /// Boundary vertices of a face, deduplicated, in no particular order.
    pub fn face_vertices(&self, f: FaceId) -> Vec<VertexId> {
        let face = &self.faces[f];
        let mut vs: Vec<VertexId> = face
            .boundary_edges()
            .flat_map(|e| [self.edges[e].left, self.edges[e].right])
            .flatten()
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Neighbors of `f` across each boundary edge (one entry per edge).
    pub fn face_neighbors(&self, f: FaceId) -> impl Iterator<Item = (FaceId, EdgeId)> + '_ {
        self.faces[f]
            .boundary_edges()
            .map(move |e| (self.edges[e].other_face(f), e))
    }

    /// The four faces around a vertex as (south, west, north, east).
    pub fn vertex_faces(&self, v: VertexId) -> [FaceId; 4] {
        self.vertices[v].faces
    }

    /// x-interval of a face in sweep coordinates: the index of the crossing
    /// that opened it (-1 for initial faces) and the one that closed it
    /// (`num_crossings` for right-open faces). Used by the renderer and for
    /// representative points.
    pub fn face_span(&self, f: FaceId) -> (i64, i64) {
        let face = &self.faces[f];
        let open = face.left_vertex.map(|v| v as i64).unwrap_or(-1);
        let close = face
            .right_vertex
            .map(|v| v as i64)
            .unwrap_or(self.vertices.len() as i64);
        (open, close)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnboundedSide {
    Left,
    Right,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiring::gen_random_wiring;

    #[test]
    fn single_line_counts() {
        let d = WiringDiagram::new(1, vec![]).unwrap();
        let g = PlaneGraph::build(&d).unwrap();
        assert_eq!(g.vertices.len(), 0);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.faces.len(), 2);
        assert_eq!(g.unbounded_faces().count(), 2);
    }

    #[test]
    fn two_lines_levels() {
        // Hand oracle: two crossing lines split the plane into a bottom
        // face (level 0), two middle faces (level 1) and a top face
        // (level 2).
        let d = WiringDiagram::new(2, vec![1]).unwrap();
        let g = PlaneGraph::build(&d).unwrap();
        let mut levels: Vec<usize> = g.faces.iter().map(|f| f.level).collect();
        levels.sort_unstable();
        assert_eq!(levels, vec![0, 1, 1, 2]);
    }

    #[test]
    fn four_line_counts() {
        let d = WiringDiagram::new(4, vec![1, 3, 2, 1, 3, 2]).unwrap();
        let g = PlaneGraph::build(&d).unwrap();
        assert_eq!(g.vertices.len(), 6);
        assert_eq!(g.edges.len(), 16);
        assert_eq!(g.faces.len(), 11);
        assert_eq!(g.unbounded_faces().count(), 8);
    }

    #[test]
    fn every_vertex_has_degree_four_with_alternating_lines() {
        let d = gen_random_wiring(6, 3);
        let g = PlaneGraph::build(&d).unwrap();
        for v in &g.vertices {
            let lines: Vec<usize> = v.edges.iter().map(|&e| g.edges[e].line).collect();
            assert_eq!(lines[0], lines[2]);
            assert_eq!(lines[1], lines[3]);
            assert_ne!(lines[0], lines[1]);
        }
    }

    #[test]
    fn edge_levels_separate_consecutive_face_levels() {
        let d = gen_random_wiring(7, 9);
        let g = PlaneGraph::build(&d).unwrap();
        for e in &g.edges {
            assert_eq!(g.faces[e.below].level, e.level);
            assert_eq!(g.faces[e.above].level, e.level + 1);
        }
    }

    #[test]
    fn below_lines_matches_level() {
        let d = gen_random_wiring(6, 12);
        let g = PlaneGraph::build(&d).unwrap();
        for f in &g.faces {
            assert_eq!(f.below_lines.count(), f.level);
        }
    }

    #[test]
    fn unbounded_face_lookup() {
        let d = gen_random_wiring(3, 5);
        let g = PlaneGraph::build(&d).unwrap();
        assert_eq!(
            g.unbounded_face(UnboundedSide::Left, 0).unwrap(),
            g.unbounded_face(UnboundedSide::Right, 0).unwrap()
        );
        assert_eq!(g.unbounded_face(UnboundedSide::Left, 3).unwrap(), g.top_face());
        // n=3: six distinct unbounded faces over levels 0..=3 with the two
        // endpoint identifications.
        let mut all: Vec<FaceId> = (0..=3)
            .flat_map(|i| {
                [
                    g.unbounded_face(UnboundedSide::Left, i).unwrap(),
                    g.unbounded_face(UnboundedSide::Right, i).unwrap(),
                ]
            })
            .collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 6);
        assert!(g.unbounded_face(UnboundedSide::Left, 4).is_err());
    }
}
