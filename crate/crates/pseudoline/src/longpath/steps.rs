//! Rerouting and discharging, steps 1 and 2.
//!
//! Step 1 walks the maximal paths of untraversed faces (which zigzag along
//! a single wall) and incorporates adjacent pairs into the tunnel path on
//! the other side of the wall, replacing one path edge by the detour
//! around the pair's shared vertex. Where a pair cannot be incorporated
//! because the path starts with two degree-2 (hence unbounded) faces, the
//! leftover bounded charges are terminally sent to those unbounded faces.
//!
//! After step 1 a traversed face can still collect two units, one through
//! an edge and one through a vertex. Step 2 either incorporates the two
//! senders by a second detour (when the next backbone edge is still
//! present) or forwards one unit to the first face of the step-1 detour
//! that consumed the backbone edge.
//!
//! Components consisting solely of unbounded faces are skipped: unbounded
//! faces never carry charge, so neither rule needs them.

use crate::error::{Error, Result};
use crate::longpath::charge::{ChargeEvent, ChargeLedger, Insertion, UnitVia};
use crate::longpath::family::{check_untraversed_paths, shared_edge, PathFamily, Phase};
use crate::plane::{FaceId, PlaneGraph};
use crate::tunnel::TunnelDecomposition;

/// Events of one pipeline run, kept for audit failure reports.
fn trace(ledger: &ChargeLedger) -> Vec<String> {
    ledger.events.iter().map(|e| e.to_string()).collect()
}

fn audit_err(ledger: &ChargeLedger, message: String) -> Error {
    Error::audit(message, trace(ledger))
}

/// Splices `[b1, b2]` between the consecutive path faces `f_enter` and
/// `f_exit` (in either orientation), fixing up certificates.
fn splice_pair(
    g: &PlaneGraph,
    family: &mut PathFamily,
    ledger: &ChargeLedger,
    f_enter: FaceId,
    f_exit: FaceId,
    b1: FaceId,
    b2: FaceId,
) -> Result<()> {
    let loc = family.locations();
    let &(pi, pos_enter) = loc
        .get(&f_enter)
        .ok_or_else(|| audit_err(ledger, format!("entry face {f_enter} not traversed")))?;
    let &(pj, pos_exit) = loc
        .get(&f_exit)
        .ok_or_else(|| audit_err(ledger, format!("exit face {f_exit} not traversed")))?;
    if pi != pj || pos_enter.abs_diff(pos_exit) != 1 {
        return Err(audit_err(
            ledger,
            format!("faces {f_enter},{f_exit} are not consecutive on a path"),
        ));
    }
    // Order the inserted pair so that the face next to `f_enter` is b1.
    let (first, second) = if pos_enter < pos_exit { (b1, b2) } else { (b2, b1) };
    let lo = pos_enter.min(pos_exit);
    let e0 = shared_edge(g, family.paths[pi].faces[lo], first)
        .ok_or_else(|| audit_err(ledger, format!("no edge between entry and {first}")))?;
    let e1 = shared_edge(g, first, second)
        .ok_or_else(|| audit_err(ledger, format!("no edge between {first} and {second}")))?;
    let e2 = shared_edge(g, second, family.paths[pi].faces[lo + 1])
        .ok_or_else(|| audit_err(ledger, format!("no edge between {second} and exit")))?;
    let path = &mut family.paths[pi];
    path.faces.splice(lo + 1..lo + 1, [first, second]);
    path.edges.splice(lo..lo + 1, [e0, e1, e2]);
    family.traversed[b1] = true;
    family.traversed[b2] = true;
    Ok(())
}

/// Wall neighbors of `b1` with `b2` located at one end; the entry face is
/// the traversed neighbor closest to `b2`.
fn entry_face(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    family: &PathFamily,
    ledger: &ChargeLedger,
    b1: FaceId,
    b2: FaceId,
) -> Result<FaceId> {
    let nbrs = td.wall_neighbors(g, b1);
    let pos = nbrs
        .iter()
        .position(|&f| f == b2)
        .ok_or_else(|| audit_err(ledger, format!("{b2} is not a wall neighbor of {b1}")))?;
    let candidate = if pos + 1 == nbrs.len() {
        nbrs[..pos].iter().rev().find(|&&f| family.traversed[f])
    } else if pos == 0 {
        nbrs[1..].iter().find(|&&f| family.traversed[f])
    } else {
        return Err(audit_err(
            ledger,
            format!("successor {b2} is interior to the wall neighbors of {b1}"),
        ));
    };
    candidate.copied().ok_or_else(|| {
        audit_err(ledger, format!("no traversed wall neighbor of {b1} beside {b2}"))
    })
}

fn insert_pair(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    family: &mut PathFamily,
    ledger: &mut ChargeLedger,
    b1: FaceId,
    b2: FaceId,
    step: &'static str,
) -> Result<()> {
    let f_enter = entry_face(g, td, family, ledger, b1, b2)?;
    if !td.bad[b2] {
        return Err(audit_err(ledger, format!("second inserted face {b2} is not bad")));
    }
    let f_exit = td.tnb[b2]
        .ok_or_else(|| audit_err(ledger, format!("bad face {b2} has no tunnel neighbor")))?;
    splice_pair(g, family, ledger, f_enter, f_exit, b1, b2)?;
    ledger.insertions.push(Insertion {
        replaced: (f_enter, f_exit),
        b1,
        b2,
    });
    ledger.events.push(ChargeEvent {
        what: step,
        source: b1,
        sink: Some(b2),
        detail: format!("inserted between {f_enter} and {f_exit}"),
    });
    ledger.delete(b1, "traversed by step 1");
    ledger.delete(b2, "traversed by step 1");
    Ok(())
}

/// Orders a component path left to right: the endpoint whose leftmost
/// wall edge comes first starts the sequence.
fn orient_component(td: &TunnelDecomposition, comp: Vec<FaceId>) -> Vec<FaceId> {
    if comp.len() < 2 {
        return comp;
    }
    let key = |f: FaceId| (td.leftmost_wall_pos(f).unwrap_or(usize::MAX), f);
    if key(comp[0]) <= key(*comp.last().unwrap()) {
        comp
    } else {
        comp.into_iter().rev().collect()
    }
}

/// Step 1: eliminate adjacent charged faces by rerouting; terminally
/// discharge what cannot be incorporated. Establishes:
/// (P1) no bounded untraversed face receives charge,
/// (P2) every face receives at most 2 units,
/// (P3) total charge equals twice the number of bounded untraversed faces.
pub fn step1(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    mut family: PathFamily,
    mut ledger: ChargeLedger,
) -> Result<(PathFamily, ChargeLedger)> {
    if family.phase != Phase::Initial {
        return Err(Error::BadParameter("step 1 expects the initial family".into()));
    }
    let before_traversed = family.traversed.clone();

    let mut components = check_untraversed_paths(g, &family)?;
    // Deterministic processing order: by wall, then leftmost wall position.
    components.sort_by_key(|comp| {
        let wall = comp
            .iter()
            .filter_map(|&f| td.face_wall[f])
            .min()
            .unwrap_or(usize::MAX);
        let pos = comp
            .iter()
            .filter_map(|&f| td.leftmost_wall_pos(f))
            .min()
            .unwrap_or(usize::MAX);
        (wall, pos, comp[0])
    });

    for comp in components {
        let mut q: &[FaceId] = &orient_component(td, comp);
        loop {
            if q.len() < 2 || !q.iter().any(|&f| g.faces[f].is_bounded()) {
                break;
            }
            let b1 = q[0];
            if g.faces[b1].degree() >= 3 {
                // 1a
                insert_pair(g, td, &mut family, &mut ledger, b1, q[1], "step-1a")?;
                q = &q[2..];
            } else if q.len() >= 5 {
                // 1b: find the smallest j <= 4 such that b_j has a
                // traversed wall neighbor left of b_{j+1}.
                let mut j_min = None;
                for j in 1..=4usize {
                    let nbrs = td.wall_neighbors(g, q[j - 1]);
                    let next_pos = nbrs.iter().position(|&f| f == q[j]);
                    let limit = next_pos.unwrap_or(nbrs.len());
                    if nbrs[..limit].iter().any(|&f| family.traversed[f]) {
                        j_min = Some(j);
                        break;
                    }
                }
                let j_min = j_min.ok_or_else(|| {
                    Error::internal("no b_j with a traversed left wall neighbor for j <= 4")
                })?;
                insert_pair(g, td, &mut family, &mut ledger, q[j_min - 1], q[j_min], "step-1b")?;
                if j_min == 4 {
                    ledger.terminal_send(q[2], q[0]);
                }
                q = &q[j_min + 1..];
            } else {
                // 1c: |Q| <= 4 with an unbounded start; charges of b3 and
                // b4 go terminally to b1 and b2.
                if q.len() >= 3 && g.faces[q[2]].is_bounded() {
                    ledger.terminal_send(q[2], q[0]);
                }
                if q.len() >= 4 && g.faces[q[3]].is_bounded() {
                    ledger.terminal_send(q[3], q[1]);
                }
                break;
            }
        }
    }

    family.phase = Phase::AfterStep1;
    audit_valid_rerouting(g, &family, &ledger, &before_traversed)?;
    audit_after_step1(g, td, &family, &ledger)?;
    Ok((family, ledger))
}

fn audit_valid_rerouting(
    g: &PlaneGraph,
    family: &PathFamily,
    ledger: &ChargeLedger,
    before: &[bool],
) -> Result<()> {
    for (f, (&was, &is)) in before.iter().zip(&family.traversed).enumerate() {
        if was && !is {
            return Err(audit_err(ledger, format!("face {f} lost traversal status")));
        }
    }
    crate::longpath::family::check_glueable(g, family)
        .map_err(|e| audit_err(ledger, format!("family no longer glueable: {e}")))
}

fn audit_after_step1(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    family: &PathFamily,
    ledger: &ChargeLedger,
) -> Result<()> {
    // (P3): the ledger keys are exactly the bounded untraversed faces.
    let n_set: Vec<FaceId> = family.bounded_untraversed(g);
    let keys: Vec<FaceId> = ledger.charges.keys().copied().collect();
    if keys != n_set {
        return Err(audit_err(
            ledger,
            format!("charged faces {keys:?} differ from bounded untraversed {n_set:?}"),
        ));
    }
    let received = ledger.received();
    for (&f, r) in &received {
        // (P2)
        if r.total > 2 {
            return Err(audit_err(ledger, format!("face {f} receives {} units", r.total)));
        }
        // (P1)
        if !family.traversed[f] && g.faces[f].is_bounded() && r.total > 0 {
            return Err(audit_err(
                &ledger,
                format!("bounded untraversed face {f} receives charge"),
            ));
        }
        // No face collects two units through edges, or two through
        // vertices.
        if r.head_edge.len() > 1 || r.head_vertex.len() > 1 {
            return Err(audit_err(
                &ledger,
                format!(
                    "face {f} receives via edges {:?} and vertices {:?}",
                    r.head_edge, r.head_vertex
                ),
            ));
        }
    }
    // Faces still sending head-rule charge sit at the right end of their
    // untraversed component.
    let components = check_untraversed_paths(g, family)?;
    for (&f, units) in &ledger.charges {
        if units.iter().any(|u| matches!(u.via, UnitVia::Edge(_) | UnitVia::Vertex(_))) {
            let comp = components
                .iter()
                .find(|c| c.contains(&f))
                .ok_or_else(|| audit_err(ledger, format!("charged face {f} not untraversed")))?;
            let oriented = orient_component(td, comp.clone());
            let rightmost_bounded = oriented
                .iter()
                .rev()
                .find(|&&x| g.faces[x].is_bounded())
                .copied();
            if oriented.len() > 1 && rightmost_bounded != Some(f) {
                return Err(audit_err(
                    ledger,
                    format!("head-rule sender {f} is not rightmost of its component {oriented:?}"),
                ));
            }
        }
    }
    Ok(())
}

/// Step 2: no traversed face may keep two units. For each such face the
/// two senders are incorporated by a detour when the local path structure
/// is intact (2a); otherwise the vertex unit is forwarded to a face that
/// provably absorbs at most one unit (2b): the face now following `f1`
/// when the backbone edge `(f1,f2)` was consumed by an earlier detour, or
/// the inserted predecessor of `f` when a neighboring detour rewired the
/// approach to `f`. Both amount to associating the unit with the detour
/// that consumed the edge. Establishes (Q1)-(Q4), which are the final
/// conditions (1)-(4).
pub fn step2(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    initial: &PathFamily,
    mut family: PathFamily,
    mut ledger: ChargeLedger,
) -> Result<(PathFamily, ChargeLedger)> {
    if family.phase != Phase::AfterStep1 {
        return Err(Error::BadParameter("step 2 expects the family after step 1".into()));
    }
    let before_traversed = family.traversed.clone();
    loop {
        let received = ledger.received();
        let candidate = received
            .iter()
            .filter(|(&f, r)| r.total >= 2 && family.traversed[f] && g.faces[f].is_bounded())
            .map(|(&f, _)| f)
            .next();
        let Some(f) = candidate else { break };
        let r = &received[&f];
        if r.head_edge.len() != 1 || r.head_vertex.len() != 1 {
            return Err(audit_err(
                &ledger,
                format!(
                    "doubly charged face {f} expects one edge and one vertex unit, got {:?}/{:?}",
                    r.head_edge, r.head_vertex
                ),
            ));
        }
        let b_e = r.head_edge[0];
        let b_v = r.head_vertex[0];

        // First and second good face after f in the original tunnel path.
        let tunnel = td.tunnel_of_face(g, f);
        if tunnel == 0 || tunnel > initial.paths.len() {
            return Err(audit_err(&ledger, format!("charged face {f} in uncovered tunnel")));
        }
        let orig = &initial.paths[tunnel - 1];
        let fpos = orig
            .faces
            .iter()
            .position(|&x| x == f)
            .ok_or_else(|| audit_err(&ledger, format!("face {f} missing from original path")))?;
        // The successors of f on the original path. Interior path faces
        // are good; f2 may also be the path's (bad) right endpoint.
        let f1 = *orig
            .faces
            .get(fpos + 1)
            .ok_or_else(|| audit_err(&ledger, format!("no face after {f} on its tunnel path")))?;
        let f2 = *orig
            .faces
            .get(fpos + 2)
            .ok_or_else(|| audit_err(&ledger, format!("no second face after {f} on its tunnel path")))?;
        if td.bad[f1] {
            return Err(audit_err(&ledger, format!("successor {f1} of doubly charged {f} is bad")));
        }

        let loc = family.locations();
        let &(pi, fp) = loc
            .get(&f)
            .ok_or_else(|| audit_err(&ledger, format!("face {f} not on a current path")))?;
        let path = &family.paths[pi];
        // The edge (f, f1) is never replaced before this point: f1 is the
        // current successor of f.
        if path.faces.get(fp + 1) != Some(&f1) {
            return Err(audit_err(
                &ledger,
                format!("successor of {f} is {:?}, expected {f1}", path.faces.get(fp + 1)),
            ));
        }
        let forward = |ledger: &mut ChargeLedger, target: FaceId, why: &str| -> Result<()> {
            let inserted: std::collections::BTreeSet<FaceId> = ledger
                .insertions
                .iter()
                .flat_map(|ins| [ins.b1, ins.b2])
                .collect();
            if !inserted.contains(&target) {
                return Err(Error::audit(
                    format!("forward target {target} is not a detour face ({why})"),
                    ledger.events.iter().map(|e| e.to_string()).collect(),
                ));
            }
            let units = ledger.charges.get_mut(&b_v).ok_or_else(|| {
                Error::internal(format!("vertex sender {b_v} has no charge entry"))
            })?;
            let unit = units
                .iter_mut()
                .find(|u| matches!(u.via, UnitVia::Vertex(_)) && u.target == f)
                .ok_or_else(|| Error::internal(format!("no vertex unit from {b_v} to {f}")))?;
            unit.target = target;
            unit.via = UnitVia::Forwarded;
            ledger.events.push(ChargeEvent {
                what: "step-2b",
                source: f,
                sink: Some(target),
                detail: format!("vertex unit of {b_v} forwarded; {why}"),
            });
            Ok(())
        };

        if path.faces.get(fp + 2) == Some(&f2) {
            // The backbone edge (f1, f2) is intact. The detour needs the
            // current predecessor of f to be adjacent to the vertex
            // sender; when a neighboring detour already rewired the
            // approach to f, the predecessor is one of its inserted faces
            // and absorbs the unit instead.
            let pr = if fp > 0 { Some(path.faces[fp - 1]) } else { None };
            let ready = pr.is_some_and(|pr| {
                [(pr, b_v), (b_v, f1), (f, b_e), (b_e, f2)]
                    .iter()
                    .all(|&(a, b)| shared_edge(g, a, b).is_some())
            });
            if ready {
                // 2a: rewire pr, f, f1, f2 -> pr, b_v, f1, f, b_e, f2.
                let pr = pr.unwrap();
                let seq = [pr, b_v, f1, f, b_e, f2];
                let mut edges = Vec::with_capacity(5);
                for pair in seq.windows(2) {
                    edges.push(shared_edge(g, pair[0], pair[1]).ok_or_else(|| {
                        audit_err(
                            &ledger,
                            format!("step 2a faces {},{} are not adjacent", pair[0], pair[1]),
                        )
                    })?);
                }
                let path = &mut family.paths[pi];
                path.faces.splice(fp - 1..fp + 3, seq);
                path.edges.splice(fp - 1..fp + 2, edges);
                family.traversed[b_v] = true;
                family.traversed[b_e] = true;
                ledger.insertions.push(Insertion {
                    replaced: (pr, f),
                    b1: b_v,
                    b2: b_e,
                });
                ledger.events.push(ChargeEvent {
                    what: "step-2a",
                    source: f,
                    sink: None,
                    detail: format!("inserted {b_v} and {b_e} around {pr},{f1},{f2}"),
                });
                ledger.delete(b_v, "traversed by step 2a");
                ledger.delete(b_e, "traversed by step 2a");
            } else {
                let pr = pr.ok_or_else(|| {
                    audit_err(&ledger, format!("face {f} has no predecessor and no detour"))
                })?;
                forward(&mut ledger, pr, "approach to f consumed by a neighboring detour")?;
            }
        } else {
            // (f1, f2) was consumed by an earlier detour (step 1 or a
            // previous 2a); the unit follows that detour's first face,
            // which directly succeeds f1 on the current path.
            let target = *family.paths[pi].faces.get(fp + 2).ok_or_else(|| {
                audit_err(&ledger, format!("no face after {f1} on the current path"))
            })?;
            forward(&mut ledger, target, "(f1,f2) consumed by an earlier detour")?;
        }
    }

    family.phase = Phase::AfterStep2;
    audit_valid_rerouting(g, &family, &ledger, &before_traversed)?;
    audit_final_conditions(g, &family, &ledger)?;
    Ok((family, ledger))
}

/// Conditions (1)-(4): untraversed bounded faces receive nothing,
/// traversed bounded faces at most one unit, unbounded faces at most two,
/// and the total equals twice the number of bounded untraversed faces.
pub fn audit_final_conditions(
    g: &PlaneGraph,
    family: &PathFamily,
    ledger: &ChargeLedger,
) -> Result<()> {
    let received = ledger.received();
    let mut total = 0usize;
    for (&f, r) in &received {
        total += r.total;
        let bounded = g.faces[f].is_bounded();
        let limit = if !bounded {
            2
        } else if family.traversed[f] {
            1
        } else {
            0
        };
        if r.total > limit {
            return Err(audit_err(
                &ledger,
                format!(
                    "face {f} (bounded={bounded}, traversed={}) receives {} units, limit {limit}",
                    family.traversed[f], r.total
                ),
            ));
        }
    }
    let n_bounded = family.bounded_untraversed(g).len();
    if total != 2 * n_bounded {
        return Err(audit_err(
            ledger,
            format!("total charge {total} != 2*|N| = {}", 2 * n_bounded),
        ));
    }
    Ok(())
}
