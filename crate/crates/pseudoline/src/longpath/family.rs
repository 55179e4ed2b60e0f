//! The initial glueable family of tunnel paths and the gluing machinery.
//!
//! With tunnels of width 2 grouped as `{0}, {1,2}, {3,4}, ...` the path
//! `P_i` (for `i = 1..=n/2`) is the unique in-tunnel path
//!
//! ```text
//!     from l_{2i-1} to r_{2i}   (i odd)
//!     from l_{2i}   to r_{2i-1} (i even)
//! ```
//!
//! Both endpoints lie in tunnel `i`; the path is the tunnel's caterpillar
//! backbone plus the endpoint leaves. Consecutive paths have adjacent end
//! faces (odd `i`) or adjacent start faces (even `i`), so the family can
//! be glued into one dual path, in forward/reverse alternation.

use crate::dual::DualGraph;
use crate::error::{Error, Result};
use crate::path::DualPath;
use crate::plane::{EdgeId, FaceId, PlaneGraph, UnboundedSide};
use crate::tunnel::TunnelDecomposition;
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Phase {
    Initial,
    AfterStep1,
    AfterStep2,
}

#[derive(Clone, Debug)]
pub struct PathFamily {
    pub phase: Phase,
    /// `paths[i]` is `P_{i+1}`, oriented left to right.
    pub paths: Vec<DualPath>,
    /// Per-face traversal flag.
    pub traversed: Vec<bool>,
}

impl PathFamily {
    pub fn bounded_traversed(&self, g: &PlaneGraph) -> Vec<FaceId> {
        (0..g.faces.len())
            .filter(|&f| self.traversed[f] && g.faces[f].is_bounded())
            .collect()
    }

    pub fn bounded_untraversed(&self, g: &PlaneGraph) -> Vec<FaceId> {
        (0..g.faces.len())
            .filter(|&f| !self.traversed[f] && g.faces[f].is_bounded())
            .collect()
    }

    pub fn untraversed(&self, g: &PlaneGraph) -> Vec<FaceId> {
        (0..g.faces.len()).filter(|&f| !self.traversed[f]).collect()
    }

    /// Path index (0-based) and position of every traversed face.
    pub fn locations(&self) -> BTreeMap<FaceId, (usize, usize)> {
        let mut out = BTreeMap::new();
        for (pi, p) in self.paths.iter().enumerate() {
            for (pos, &f) in p.faces.iter().enumerate() {
                out.insert(f, (pi, pos));
            }
        }
        out
    }
}

/// The first edge shared by two faces (smallest id), if any.
pub fn shared_edge(g: &PlaneGraph, a: FaceId, b: FaceId) -> Option<EdgeId> {
    g.faces[a]
        .boundary_edges()
        .filter(|&e| g.edges[e].other_face(a) == b)
        .min()
}

/// Builds the initial family on a width-2 decomposition with offset 1.
pub fn initial_family(g: &PlaneGraph, td: &TunnelDecomposition) -> Result<PathFamily> {
    if !g.is_full() {
        return Err(Error::NotFullArrangement("initial family needs a full arrangement".into()));
    }
    if td.w != 2 || td.offset != 1 {
        return Err(Error::BadParameter(
            "initial_family expects the width-2, offset-1 decomposition".into(),
        ));
    }
    let n = g.n;
    let mut paths = Vec::new();
    let mut traversed = vec![false; g.faces.len()];
    for i in 1..=n / 2 {
        let (start, end) = if i % 2 == 1 {
            (
                g.unbounded_face(UnboundedSide::Left, 2 * i - 1)?,
                g.unbounded_face(UnboundedSide::Right, 2 * i)?,
            )
        } else {
            (
                g.unbounded_face(UnboundedSide::Left, 2 * i)?,
                g.unbounded_face(UnboundedSide::Right, 2 * i - 1)?,
            )
        };
        let path = tunnel_path(g, td, i, start, end)?;
        for &f in &path.faces {
            if traversed[f] {
                return Err(Error::internal(format!(
                    "initial paths overlap at face {f}"
                )));
            }
            traversed[f] = true;
        }
        paths.push(path);
    }
    Ok(PathFamily {
        phase: Phase::Initial,
        paths,
        traversed,
    })
}

/// Unique path between two faces of a tunnel (its dual graph is a tree).
fn tunnel_path(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    tunnel: usize,
    start: FaceId,
    end: FaceId,
) -> Result<DualPath> {
    let mut parent: BTreeMap<FaceId, (FaceId, EdgeId)> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    parent.insert(start, (start, usize::MAX));
    while let Some(f) = queue.pop_front() {
        if f == end {
            break;
        }
        for (nb, e) in td.tunnel_neighbors(g, f) {
            if td.tunnel_of_face(g, nb) == tunnel && !parent.contains_key(&nb) {
                parent.insert(nb, (f, e));
                queue.push_back(nb);
            }
        }
    }
    if !parent.contains_key(&end) {
        return Err(Error::internal(format!(
            "tunnel {tunnel} has no path from {start} to {end}"
        )));
    }
    let mut faces = vec![end];
    let mut edges = Vec::new();
    let mut cur = end;
    while cur != start {
        let (p, e) = parent[&cur];
        faces.push(p);
        edges.push(e);
        cur = p;
    }
    faces.reverse();
    edges.reverse();
    Ok(DualPath { faces, edges })
}

/// The cycle of unbounded faces, counterclockwise from the bottom face:
/// bottom, right side going up, top, left side going down. Entry `i` is
/// `(face, edge to the next entry)`.
pub fn unbounded_cycle(g: &PlaneGraph) -> Vec<(FaceId, EdgeId)> {
    let n = g.n;
    let mut cycle = Vec::with_capacity(2 * n);
    for level in 0..n {
        cycle.push((g.right_unbounded[level], g.right_edges[level]));
    }
    for level in (1..=n).rev() {
        cycle.push((g.left_unbounded[level], level - 1));
    }
    cycle
}

/// Glues a subset of the family's paths into one dual path: paths appear
/// in ascending index order, alternating forward and reverse orientation;
/// gaps are bridged by connectors running along the unbounded-face cycle.
/// Connector faces must be unbounded and not used by any selected path.
pub fn glue(g: &PlaneGraph, family: &PathFamily, subset: Option<&[usize]>) -> Result<DualPath> {
    let all: Vec<usize> = (1..=family.paths.len()).collect();
    let subset: Vec<usize> = match subset {
        None => all,
        Some(s) => {
            let mut s = s.to_vec();
            s.sort_unstable();
            s.dedup();
            for &i in &s {
                if i == 0 || i > family.paths.len() {
                    return Err(Error::BadParameter(format!("no path P_{i} in the family")));
                }
            }
            s
        }
    };
    if subset.is_empty() {
        return Ok(DualPath::default());
    }
    let cycle = unbounded_cycle(g);
    let cycle_pos: BTreeMap<FaceId, usize> =
        cycle.iter().enumerate().map(|(i, &(f, _))| (f, i)).collect();

    let mut used = vec![false; g.faces.len()];
    for &i in &subset {
        for &f in &family.paths[i - 1].faces {
            used[f] = true;
        }
    }

    let mut out = DualPath::default();
    for (pos, &i) in subset.iter().enumerate() {
        let p = &family.paths[i - 1];
        let oriented = if pos % 2 == 0 { p.clone() } else { p.reversed() };
        if pos > 0 {
            let from = *out.faces.last().unwrap();
            let to = oriented.faces[0];
            let (conn_faces, conn_edges) =
                cycle_connector(g, &cycle, &cycle_pos, &used, from, to)?;
            for &f in &conn_faces {
                used[f] = true;
            }
            out.edges.extend(conn_edges);
            out.faces.extend(conn_faces);
        }
        out.faces.extend(oriented.faces.iter().copied());
        out.edges.extend(oriented.edges.iter().copied());
    }
    Ok(out)
}

/// Walks the unbounded cycle from `from` to `to` (both are unbounded),
/// returning the intermediate faces plus all certificate edges, including
/// the edges attaching to `from` and `to`. Prefers the direction whose
/// intermediate faces are all unused; on a tie picks the shorter walk,
/// then the forward (counterclockwise) one.
fn cycle_connector(
    _g: &PlaneGraph,
    cycle: &[(FaceId, EdgeId)],
    cycle_pos: &BTreeMap<FaceId, usize>,
    used: &[bool],
    from: FaceId,
    to: FaceId,
) -> Result<(Vec<FaceId>, Vec<EdgeId>)> {
    let m = cycle.len();
    let &a = cycle_pos
        .get(&from)
        .ok_or_else(|| Error::internal(format!("glue endpoint {from} not unbounded")))?;
    let &b = cycle_pos
        .get(&to)
        .ok_or_else(|| Error::internal(format!("glue endpoint {to} not unbounded")))?;
    let walk = |forward: bool| -> std::result::Result<(Vec<FaceId>, Vec<EdgeId>), FaceId> {
        let mut faces = Vec::new();
        let mut edges = Vec::new();
        let mut i = a;
        loop {
            let next = if forward { (i + 1) % m } else { (i + m - 1) % m };
            edges.push(if forward { cycle[i].1 } else { cycle[next].1 });
            i = next;
            if i == b {
                return Ok((faces, edges));
            }
            let f = cycle[i].0;
            if used[f] {
                return Err(f);
            }
            faces.push(f);
        }
    };
    match (walk(true), walk(false)) {
        (Ok(f1), Ok(f2)) => Ok(if f1.0.len() <= f2.0.len() { f1 } else { f2 }),
        (Ok(f1), Err(_)) => Ok(f1),
        (Err(_), Ok(f2)) => Ok(f2),
        (Err(f), Err(_)) => Err(Error::UngluableSubset(f)),
    }
}

/// Checks that a family is glueable: paths pairwise disjoint, and the end
/// faces (odd index) / start faces (even index) of consecutive paths are
/// adjacent.
pub fn check_glueable(g: &PlaneGraph, family: &PathFamily) -> Result<()> {
    let mut seen = vec![false; g.faces.len()];
    for p in &family.paths {
        for &f in &p.faces {
            if seen[f] {
                return Err(Error::internal(format!("face {f} on two paths")));
            }
            seen[f] = true;
        }
    }
    for i in 1..family.paths.len() {
        let (p, q) = (&family.paths[i - 1], &family.paths[i]);
        let (a, b) = if i % 2 == 1 {
            // spec index i is odd: end faces adjacent
            (p.last().unwrap(), q.last().unwrap())
        } else {
            (p.first().unwrap(), q.first().unwrap())
        };
        if shared_edge(g, a, b).is_none() {
            return Err(Error::internal(format!(
                "paths P_{i} and P_{} are not glueable at faces {a},{b}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Audits the initial family: every good face of a covered tunnel is
/// traversed; every bad traversed face is a path endpoint; the family is
/// glueable; the induced graph on untraversed faces is a disjoint union
/// of paths whose edges are wall edges.
pub fn audit_initial_family(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    family: &PathFamily,
) -> Result<()> {
    check_glueable(g, family)?;
    for (pi, p) in family.paths.iter().enumerate() {
        let tunnel = pi + 1;
        for &f in &td.tunnels[tunnel] {
            if !td.bad[f] && !p.faces.contains(&f) {
                return Err(Error::internal(format!(
                    "good face {f} of tunnel {tunnel} missed by P_{}",
                    pi + 1
                )));
            }
        }
        for &f in &p.faces {
            if td.tunnel_of_face(g, f) != tunnel {
                return Err(Error::internal(format!(
                    "P_{} leaves its tunnel at face {f}",
                    pi + 1
                )));
            }
            if td.bad[f] && f != p.faces[0] && f != *p.faces.last().unwrap() {
                return Err(Error::internal(format!(
                    "bad face {f} is interior to P_{}",
                    pi + 1
                )));
            }
        }
    }
    check_untraversed_paths(g, family).map(|_| ())
}

/// The connected components of the dual graph induced on untraversed
/// faces, each verified to be a simple path and returned in path order.
pub fn check_untraversed_paths(g: &PlaneGraph, family: &PathFamily) -> Result<Vec<Vec<FaceId>>> {
    let dual = DualGraph::build(g);
    let in_n = |f: FaceId| !family.traversed[f];
    let mut seen = vec![false; g.faces.len()];
    let mut components = Vec::new();
    for f0 in (0..g.faces.len()).filter(|&f| in_n(f)) {
        if seen[f0] {
            continue;
        }
        // collect the component
        let mut comp = vec![f0];
        seen[f0] = true;
        let mut stack = vec![f0];
        while let Some(f) = stack.pop() {
            let mut nbrs: Vec<FaceId> = dual
                .neighbors(f)
                .iter()
                .map(|&(nb, _)| nb)
                .filter(|&nb| in_n(nb))
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            for nb in nbrs {
                if !seen[nb] {
                    seen[nb] = true;
                    comp.push(nb);
                    stack.push(nb);
                }
            }
        }
        // verify path shape: degrees <= 2 and arc count = |comp| - 1
        let comp_set: std::collections::BTreeSet<FaceId> = comp.iter().copied().collect();
        let mut ends = Vec::new();
        let mut arc_pairs = 0usize;
        for &f in &comp {
            let mut nbrs: Vec<FaceId> = dual
                .neighbors(f)
                .iter()
                .map(|&(nb, _)| nb)
                .filter(|nb| comp_set.contains(nb))
                .collect();
            nbrs.sort_unstable();
            nbrs.dedup();
            if nbrs.len() > 2 {
                return Err(Error::internal(format!(
                    "untraversed face {f} has {} untraversed neighbors",
                    nbrs.len()
                )));
            }
            if nbrs.len() <= 1 {
                ends.push(f);
            }
            arc_pairs += nbrs.len();
        }
        if arc_pairs != 2 * (comp.len() - 1) {
            return Err(Error::internal(
                "untraversed component is not acyclic".to_string(),
            ));
        }
        // order the component as a path from one end
        let ordered = if comp.len() == 1 {
            comp
        } else {
            let start = *ends.iter().min().unwrap();
            let mut ordered = vec![start];
            let mut prev = usize::MAX;
            let mut cur = start;
            while ordered.len() < comp_set.len() {
                let mut nbrs: Vec<FaceId> = dual
                    .neighbors(cur)
                    .iter()
                    .map(|&(nb, _)| nb)
                    .filter(|nb| comp_set.contains(nb) && *nb != prev)
                    .collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                if nbrs.len() != 1 {
                    return Err(Error::internal(
                        "untraversed component is not a simple path".to_string(),
                    ));
                }
                prev = cur;
                cur = nbrs[0];
                ordered.push(cur);
            }
            ordered
        };
        components.push(ordered);
    }
    Ok(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiring::{gen_random_wiring, WiringDiagram};

    fn family_for(d: &WiringDiagram) -> (PlaneGraph, TunnelDecomposition, PathFamily) {
        let g = PlaneGraph::build(d).unwrap();
        let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
        let fam = initial_family(&g, &td).unwrap();
        (g, td, fam)
    }

    #[test]
    fn two_lines_single_path() {
        let (g, _, fam) = family_for(&WiringDiagram::new(2, vec![1]).unwrap());
        assert_eq!(fam.paths.len(), 1);
        assert_eq!(fam.paths[0].faces.len(), 2);
        assert_eq!(fam.paths[0].faces[0], g.unbounded_face(UnboundedSide::Left, 1).unwrap());
        assert_eq!(fam.paths[0].faces[1], g.top_face());
    }

    #[test]
    fn initial_family_is_glueable_and_audited() {
        for seed in 0..12 {
            for n in 2..10 {
                let d = gen_random_wiring(n, seed);
                let (g, td, fam) = family_for(&d);
                audit_initial_family(&g, &td, &fam)
                    .unwrap_or_else(|e| panic!("n={n} seed={seed}: {e}"));
            }
        }
    }

    #[test]
    fn path_lengths_meet_the_quadratic_bound() {
        for seed in 0..10 {
            for n in 2..11 {
                let d = gen_random_wiring(n, seed);
                let (_, _, fam) = family_for(&d);
                let total: usize = fam.paths.iter().map(|p| p.faces.len()).sum();
                let bound = (n * n) as i64 / 4 - n as i64;
                assert!(
                    total as i64 >= bound,
                    "n={n} seed={seed}: total {total} < bound {bound}"
                );
            }
        }
    }

    #[test]
    fn glue_single_path_is_identity() {
        let d = gen_random_wiring(6, 8);
        let (g, _, fam) = family_for(&d);
        let p = glue(&g, &fam, Some(&[1])).unwrap();
        assert_eq!(p, fam.paths[0]);
    }

    #[test]
    fn glue_all_produces_valid_path() {
        for seed in 0..8 {
            let d = gen_random_wiring(7, seed);
            let (g, _, fam) = family_for(&d);
            let p = glue(&g, &fam, None).unwrap();
            let violations = crate::path::verify_path(&g, &p, None);
            assert!(violations.is_empty(), "seed {seed}: {violations:?}");
            let covered: usize = fam.paths.iter().map(|q| q.faces.len()).sum();
            assert!(p.faces.len() >= covered);
        }
    }
}
