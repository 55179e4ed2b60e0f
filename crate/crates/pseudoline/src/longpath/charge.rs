//! The charge ledger.
//!
//! Every bounded face not traversed by the current family owns two units
//! of charge, thought of as being on their way to a destination. The head
//! rule routes one unit through the face's leftmost wall edge and the
//! other through the right vertex of that edge. The rerouting steps may
//! overwrite routes (terminal sends, forwarding) or delete both units when
//! their owner becomes traversed. The audit conditions are all statements
//! about how many units currently land on each face.

use crate::error::{Error, Result};
use crate::longpath::family::PathFamily;
use crate::plane::{EdgeId, FaceId, PlaneGraph, VertexId};
use crate::tunnel::TunnelDecomposition;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum UnitVia {
    /// Head rule, through the owner's leftmost wall edge.
    Edge(EdgeId),
    /// Head rule, through the right vertex of the leftmost wall edge.
    Vertex(VertexId),
    /// Terminal send from step 1; never rerouted again.
    Terminal,
    /// Redistributed in step 2 to the first inserted face of a step-1
    /// rerouting.
    Forwarded,
}

#[derive(Clone, Debug)]
pub struct ChargeUnit {
    pub target: FaceId,
    pub via: UnitVia,
}

#[derive(Clone, Debug)]
pub struct ChargeEvent {
    pub what: &'static str,
    pub source: FaceId,
    pub sink: Option<FaceId>,
    pub detail: String,
}

impl fmt::Display for ChargeEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} source={}", self.what, self.source)?;
        if let Some(s) = self.sink {
            write!(f, " sink={s}")?;
        }
        if !self.detail.is_empty() {
            write!(f, " ({})", self.detail)?;
        }
        Ok(())
    }
}

/// A step-1 rerouting record: the path edge `(f_enter, f_exit)` replaced
/// by the detour through `b1, b2`. Step 2b forwards charge to `b1`.
#[derive(Clone, Debug)]
pub struct Insertion {
    pub replaced: (FaceId, FaceId),
    pub b1: FaceId,
    pub b2: FaceId,
}

#[derive(Clone, Debug, Default)]
pub struct ChargeLedger {
    /// Outgoing units per charged (bounded, untraversed) face:
    /// `[edge unit, vertex unit]`.
    pub charges: BTreeMap<FaceId, [ChargeUnit; 2]>,
    pub events: Vec<ChargeEvent>,
    pub insertions: Vec<Insertion>,
}

impl ChargeLedger {
    /// Units currently landing on each face, split by head-rule class.
    pub fn received(&self) -> BTreeMap<FaceId, Received> {
        let mut out: BTreeMap<FaceId, Received> = BTreeMap::new();
        for (&src, units) in &self.charges {
            for u in units {
                let r = out.entry(u.target).or_default();
                r.total += 1;
                match u.via {
                    UnitVia::Edge(_) => r.head_edge.push(src),
                    UnitVia::Vertex(_) => r.head_vertex.push(src),
                    UnitVia::Terminal => r.terminal += 1,
                    UnitVia::Forwarded => r.forwarded += 1,
                }
            }
        }
        out
    }

    pub fn total_charge(&self) -> usize {
        self.charges.len() * 2
    }

    /// Deletes the outgoing units of a face that became traversed.
    pub fn delete(&mut self, f: FaceId, why: &'static str) {
        if self.charges.remove(&f).is_some() {
            self.events.push(ChargeEvent {
                what: "charge-deleted",
                source: f,
                sink: None,
                detail: why.to_string(),
            });
        }
    }

    /// Terminal send of both units of `src` to `dst`.
    pub fn terminal_send(&mut self, src: FaceId, dst: FaceId) {
        if let Some(units) = self.charges.get_mut(&src) {
            for u in units {
                u.target = dst;
                u.via = UnitVia::Terminal;
            }
            self.events.push(ChargeEvent {
                what: "terminal-send",
                source: src,
                sink: Some(dst),
                detail: String::new(),
            });
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Received {
    pub total: usize,
    pub head_edge: Vec<FaceId>,
    pub head_vertex: Vec<FaceId>,
    pub terminal: usize,
    pub forwarded: usize,
}

/// Head-rule targets of a charged face: `(edge target, vertex target)`.
/// The edge target is the wall neighbor across the face's leftmost wall
/// edge; the vertex target is the face across the right vertex of that
/// edge. Both land in an adjacent tunnel and the vertex target is good.
pub fn head_rule_targets(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    f: FaceId,
) -> Result<(FaceId, FaceId, EdgeId, VertexId)> {
    if !td.bad[f] || !g.faces[f].is_bounded() {
        return Err(Error::BadParameter(format!(
            "head rule applies to bounded bad faces, not {f}"
        )));
    }
    let &leftmost = td.face_wall_edges[f]
        .first()
        .ok_or_else(|| Error::internal(format!("bad face {f} has no wall edge")))?;
    let edge_target = g.edges[leftmost].other_face(f);
    let v = g.edges[leftmost]
        .right
        .ok_or_else(|| Error::internal(format!("wall edge {leftmost} has no right vertex")))?;
    let faces = g.vertex_faces(v);
    // A bounded bad face has at least two wall edges, so the right vertex
    // of its leftmost wall edge is interior to its wall chain: the face is
    // the south or north face there, and the target is the opposite one.
    let vertex_target = if faces[0] == f {
        faces[2]
    } else if faces[2] == f {
        faces[0]
    } else {
        return Err(Error::internal(format!(
            "face {f} is not north or south at vertex {v}"
        )));
    };
    if td.bad[vertex_target] {
        return Err(Error::internal(format!(
            "vertex target {vertex_target} of face {f} is bad"
        )));
    }
    let tf = td.tunnel_of_face(g, f);
    for target in [edge_target, vertex_target] {
        let tt = td.tunnel_of_face(g, target);
        if tf.abs_diff(tt) != 1 {
            return Err(Error::internal(format!(
                "head-rule target {target} of face {f} lies in tunnel {tt}, not adjacent to {tf}"
            )));
        }
    }
    Ok((edge_target, vertex_target, leftmost, v))
}

/// Two units on every bounded untraversed face, routed by the head rule.
pub fn initial_charge(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    family: &PathFamily,
) -> Result<ChargeLedger> {
    let mut ledger = ChargeLedger::default();
    for f in family.bounded_untraversed(g) {
        if !td.bad[f] {
            return Err(Error::internal(format!(
                "bounded untraversed face {f} is not bad"
            )));
        }
        let (edge_target, vertex_target, e, v) = head_rule_targets(g, td, f)?;
        ledger.charges.insert(
            f,
            [
                ChargeUnit {
                    target: edge_target,
                    via: UnitVia::Edge(e),
                },
                ChargeUnit {
                    target: vertex_target,
                    via: UnitVia::Vertex(v),
                },
            ],
        );
        ledger.events.push(ChargeEvent {
            what: "head-rule",
            source: f,
            sink: None,
            detail: format!("edge unit -> {edge_target} via edge {e}, vertex unit -> {vertex_target} via vertex {v}"),
        });
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::longpath::family::initial_family;
    use crate::wiring::{gen_random_wiring, WiringDiagram};

    #[test]
    fn two_lines_have_no_charge() {
        let g = PlaneGraph::build(&WiringDiagram::new(2, vec![1]).unwrap()).unwrap();
        let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
        let fam = initial_family(&g, &td).unwrap();
        let ledger = initial_charge(&g, &td, &fam).unwrap();
        assert_eq!(ledger.total_charge(), 0);
    }

    #[test]
    fn charge_totals_and_targets_on_random_corpus() {
        for seed in 0..10 {
            for n in 3..10 {
                let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
                let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
                let fam = initial_family(&g, &td).unwrap();
                let ledger = initial_charge(&g, &td, &fam).unwrap();
                let n_faces = fam.bounded_untraversed(&g).len();
                assert_eq!(ledger.total_charge(), 2 * n_faces);
                // every charged face is bad and bounded
                for &f in ledger.charges.keys() {
                    assert!(td.bad[f] && g.faces[f].is_bounded());
                }
            }
        }
    }
}
