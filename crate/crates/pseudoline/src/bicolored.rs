//! Bicolored arrangements: the directed dual graph whose directed paths
//! are exactly the alternating dual paths, reachability, face depth, and
//! the randomized tunnel construction with its Monte Carlo harness.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::path::{verify_path, DualPath};
use crate::plane::{EdgeId, FaceId, PlaneGraph};
use crate::tunnel::TunnelDecomposition;
use crate::wiring::LineColor;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

/// Per-pseudoline colors; both colors must occur.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring(pub Vec<LineColor>);

impl Coloring {
    pub fn new(colors: Vec<LineColor>) -> Result<Self> {
        let reds = colors.iter().filter(|c| **c == LineColor::Red).count();
        if reds == 0 || reds == colors.len() {
            return Err(Error::MonochromaticColoring);
        }
        Ok(Coloring(colors))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let colors: Result<Vec<LineColor>> = s
            .chars()
            .map(|c| match c {
                'R' | 'r' => Ok(LineColor::Red),
                'B' | 'b' => Ok(LineColor::Blue),
                other => Err(Error::Parse(format!("bad color letter {other:?}"))),
            })
            .collect();
        Coloring::new(colors?)
    }

    pub fn flipped(&self) -> Coloring {
        Coloring(self.0.iter().map(|c| c.flip()).collect())
    }
}

/// Faces are 2-colored by level parity (black = even); arcs run from the
/// white face to the black face across blue edges and from black to white
/// across red edges, so directed paths alternate edge colors.
#[derive(Clone, Debug)]
pub struct DirectedDual {
    pub out: Vec<Vec<(FaceId, EdgeId)>>,
    pub arc_count: usize,
}

pub fn is_black(g: &PlaneGraph, f: FaceId) -> bool {
    g.faces[f].level % 2 == 0
}

pub fn build_directed_dual(g: &PlaneGraph, c: &Coloring) -> Result<DirectedDual> {
    if c.0.len() != g.n {
        return Err(Error::BadParameter(format!(
            "coloring has {} entries for {} pseudolines",
            c.0.len(),
            g.n
        )));
    }
    let mut out = vec![Vec::new(); g.faces.len()];
    for (e, edge) in g.edges.iter().enumerate() {
        let (below, above) = edge.faces();
        let (black, white) = if is_black(g, below) {
            (below, above)
        } else {
            (above, below)
        };
        match c.0[edge.line] {
            LineColor::Blue => out[white].push((black, e)),
            LineColor::Red => out[black].push((white, e)),
        }
    }
    for list in &mut out {
        list.sort_unstable_by_key(|&(_, e)| e);
    }
    Ok(DirectedDual {
        out,
        arc_count: g.edges.len(),
    })
}

/// Faces reachable from `z` by directed paths (including `z`), ascending.
pub fn reach(dd: &DirectedDual, z: FaceId) -> Result<Vec<FaceId>> {
    if z >= dd.out.len() {
        return Err(Error::UnknownFace(z));
    }
    let mut seen = vec![false; dd.out.len()];
    seen[z] = true;
    let mut queue = VecDeque::from([z]);
    while let Some(f) = queue.pop_front() {
        for &(nb, _) in &dd.out[f] {
            if !seen[nb] {
                seen[nb] = true;
                queue.push_back(nb);
            }
        }
    }
    Ok((0..dd.out.len()).filter(|&f| seen[f]).collect())
}

/// The boundary law behind the randomized construction: on the edge set
/// separating `reach(z)` from its complement, no red edge shares a vertex
/// with a blue edge.
pub fn verify_reach_boundary(
    g: &PlaneGraph,
    c: &Coloring,
    reach_set: &[FaceId],
) -> Result<()> {
    let mut inside = vec![false; g.faces.len()];
    for &f in reach_set {
        inside[f] = true;
    }
    let boundary: Vec<EdgeId> = (0..g.edges.len())
        .filter(|&e| inside[g.edges[e].below] != inside[g.edges[e].above])
        .collect();
    let mut by_vertex: std::collections::BTreeMap<usize, (bool, bool)> = Default::default();
    for &e in &boundary {
        for v in [g.edges[e].left, g.edges[e].right].into_iter().flatten() {
            let entry = by_vertex.entry(v).or_default();
            match c.0[g.edges[e].line] {
                LineColor::Red => entry.0 = true,
                LineColor::Blue => entry.1 = true,
            }
        }
    }
    for (v, (red, blue)) in by_vertex {
        if red && blue {
            return Err(Error::internal(format!(
                "reach boundary has a red and a blue edge sharing vertex {v}"
            )));
        }
    }
    Ok(())
}

/// Depth of every face: the minimum number of pseudolines separating it
/// from an unbounded face.
#[derive(Clone, Debug)]
pub struct DepthMap {
    pub depth: Vec<usize>,
}

pub fn depth_map(g: &PlaneGraph) -> DepthMap {
    let unbounded: Vec<&BitSet> = g
        .unbounded_faces()
        .map(|f| &g.faces[f].below_lines)
        .collect();
    let depth = g
        .faces
        .iter()
        .map(|face| {
            unbounded
                .iter()
                .map(|u| face.below_lines.distance(u))
                .min()
                .unwrap_or(0)
        })
        .collect();
    DepthMap { depth }
}

impl DepthMap {
    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Faces of depth at most `w` (the outer tunnel).
    pub fn outer_tunnel(&self, w: usize) -> Vec<FaceId> {
        (0..self.depth.len()).filter(|&f| self.depth[f] <= w).collect()
    }
}

/// Outcome of one randomized construction attempt.
#[derive(Clone, Debug)]
pub struct Thm3Result {
    pub w: usize,
    pub success: bool,
    pub left: Option<DualPath>,
    pub right: Option<DualPath>,
    /// Tunnel paths `P_1 .. P_{l-1}`; `None` records event `A_i`.
    pub tunnel_paths: Vec<Option<DualPath>>,
    pub glued: Option<DualPath>,
    /// Tunnel indices whose path was blocked.
    pub a_events: Vec<usize>,
    /// One of the outer paths was blocked.
    pub b_event: bool,
    /// Per middle-tunnel extension lengths (left, right), for accounting.
    pub extensions: Vec<Option<(usize, usize)>>,
}

/// Directed BFS within an allowed face set from any source to any target;
/// deterministic (sorted adjacency, FIFO).
fn directed_bfs(
    dd: &DirectedDual,
    allowed: &[bool],
    sources: &[FaceId],
    targets: &[bool],
) -> Option<DualPath> {
    let mut parent: Vec<Option<(FaceId, EdgeId)>> = vec![None; dd.out.len()];
    let mut seen = vec![false; dd.out.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if allowed[s] && !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    let mut goal = None;
    'bfs: while let Some(f) = queue.pop_front() {
        if targets[f] {
            goal = Some(f);
            break 'bfs;
        }
        for &(nb, e) in &dd.out[f] {
            if allowed[nb] && !seen[nb] {
                seen[nb] = true;
                parent[nb] = Some((f, e));
                queue.push_back(nb);
            }
        }
    }
    let goal = goal?;
    let mut faces = vec![goal];
    let mut edges = Vec::new();
    let mut cur = goal;
    while let Some((p, e)) = parent[cur] {
        faces.push(p);
        edges.push(e);
        cur = p;
    }
    faces.reverse();
    edges.reverse();
    Some(DualPath { faces, edges })
}

/// Crossing faces of an outer path: for each wall, the first upward
/// crossing yields the face just before (odd slot) and just after (even
/// slot) in traversal order. Slot `2k-1` and `2k` belong to wall `k`.
fn crossing_faces(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    path: &DualPath,
) -> Vec<Option<(FaceId, FaceId)>> {
    let walls = td.tunnel_count - 1;
    let mut out = vec![None; walls + 1];
    for pair in path.faces.windows(2) {
        let (ta, tb) = (
            td.tunnel_of_face(g, pair[0]),
            td.tunnel_of_face(g, pair[1]),
        );
        if tb == ta + 1 && out[tb].is_none() {
            out[tb] = Some((pair[0], pair[1]));
        }
    }
    out
}

/// The randomized construction: outer paths `L` and `R` through the outer
/// tunnel from the bottom level-tunnel to the top one (around the left and
/// right side respectively), then one directed path per middle tunnel
/// between the prescribed crossing faces, glued along arcs of `L`/`R`.
pub fn construct_thm3(
    g: &PlaneGraph,
    c: &Coloring,
    w: usize,
) -> Result<Thm3Result> {
    if w < 3 {
        return Err(Error::BadParameter(format!("tunnel width {w} must be at least 3")));
    }
    let td = TunnelDecomposition::new(g, w.min(g.n + 1))?;
    let l = td.tunnel_count - 1;
    if l < 1 {
        return Err(Error::Unsupported(format!(
            "w = {w} yields a single tunnel; the construction needs at least two"
        )));
    }
    let dd = build_directed_dual(g, c)?;

    // The outer routes hug their side of the arrangement: a face qualifies
    // for the left route when at most `w` pseudolines separate it from
    // some left-side unbounded face (bottom and top included, so the
    // route can start in the bottom tunnel and finish in the top one).
    // This keeps every wall crossing within `w` lines of its side, which
    // is what makes the per-tunnel length accounting work.
    let side_sep = |f: FaceId, left: bool| -> usize {
        let levels = 0..=g.n;
        levels
            .map(|lvl| {
                let u = if left {
                    g.left_unbounded[lvl]
                } else {
                    g.right_unbounded[lvl]
                };
                g.faces[f].below_lines.distance(&g.faces[u].below_lines)
            })
            .min()
            .unwrap()
    };
    let allowed_left: Vec<bool> = (0..g.faces.len()).map(|f| side_sep(f, true) <= w).collect();
    let allowed_right: Vec<bool> = (0..g.faces.len()).map(|f| side_sep(f, false) <= w).collect();
    let bottom_sources: Vec<FaceId> = (0..g.faces.len())
        .filter(|&f| td.tunnel_of_face(g, f) == 0)
        .collect();
    let mut top_targets = vec![false; g.faces.len()];
    for f in 0..g.faces.len() {
        if td.tunnel_of_face(g, f) == l {
            top_targets[f] = true;
        }
    }
    let left = directed_bfs(&dd, &allowed_left, &bottom_sources, &top_targets);
    let right = directed_bfs(&dd, &allowed_right, &bottom_sources, &top_targets);

    let mut result = Thm3Result {
        w,
        success: false,
        left: left.clone(),
        right: right.clone(),
        tunnel_paths: Vec::new(),
        glued: None,
        a_events: Vec::new(),
        b_event: left.is_none() || right.is_none(),
        extensions: Vec::new(),
    };
    let (Some(left), Some(right)) = (left, right) else {
        return Ok(result);
    };

    let lcross = crossing_faces(g, &td, &left);
    let rcross = crossing_faces(g, &td, &right);
    // l~ and r~ with 1-based slots: slot 2i is the arrival into tunnel i,
    // slot 2i+1 the departure face (before crossing wall i+1).
    let slot = |cross: &[Option<(FaceId, FaceId)>], s: usize| -> Option<FaceId> {
        let wall = s.div_ceil(2);
        let (before, after) = cross.get(wall).copied().flatten()?;
        Some(if s % 2 == 1 { before } else { after })
    };

    let mut tunnel_paths = Vec::new();
    let mut extensions = Vec::new();
    for i in 1..l {
        let (from, to) = if i % 2 == 0 {
            (slot(&lcross, 2 * i), slot(&rcross, 2 * i + 1))
        } else {
            (slot(&rcross, 2 * i), slot(&lcross, 2 * i + 1))
        };
        let (Some(from), Some(to)) = (from, to) else {
            result.a_events.push(i);
            tunnel_paths.push(None);
            extensions.push(None);
            continue;
        };
        let mut allowed = vec![false; g.faces.len()];
        for f in 0..g.faces.len() {
            if td.tunnel_of_face(g, f) == i {
                allowed[f] = true;
            }
        }
        let mut targets = vec![false; g.faces.len()];
        targets[to] = true;
        match directed_bfs(&dd, &allowed, &[from], &targets) {
            Some(p) => {
                extensions.push(Some(extension_lengths(g, &td, i, &p)));
                tunnel_paths.push(Some(p));
            }
            None => {
                result.a_events.push(i);
                tunnel_paths.push(None);
                extensions.push(None);
            }
        }
    }
    result.extensions = extensions;

    if result.a_events.is_empty() && l >= 2 {
        // Glue P_1 P_2 ... along the single arcs of L and R between the
        // consecutive crossing faces.
        let mut glued = DualPath::default();
        for (idx, p) in tunnel_paths.iter().enumerate() {
            let p = p.as_ref().unwrap();
            if !glued.is_empty() {
                let join_on = if idx % 2 == 1 { &left } else { &right };
                let from = *glued.faces.last().unwrap();
                let to = p.faces[0];
                let pos = join_on
                    .faces
                    .iter()
                    .position(|&f| f == from)
                    .filter(|&pos| join_on.faces.get(pos + 1) == Some(&to))
                    .ok_or_else(|| {
                        Error::internal(format!(
                            "crossing faces {from},{to} are not consecutive on the outer path"
                        ))
                    })?;
                glued.edges.push(join_on.edges[pos]);
            }
            glued.faces.extend(p.faces.iter().copied());
            glued.edges.extend(p.edges.iter().copied());
        }
        let violations = verify_path(g, &glued, Some(&c.0));
        if !violations.is_empty() {
            return Err(Error::internal(format!(
                "glued randomized path invalid: {}",
                violations[0]
            )));
        }
        result.glued = Some(glued);
        result.success = true;
    } else if result.a_events.is_empty() {
        // Two tunnels: no middle tunnels to route, the outer paths alone
        // certify the trial.
        result.success = true;
        result.glued = Some(DualPath::default());
    }
    result.tunnel_paths = tunnel_paths;
    Ok(result)
}

/// Shortest undirected in-tunnel extensions from the path's endpoints to
/// left and right unbounded faces, for the length accounting.
fn extension_lengths(
    g: &PlaneGraph,
    td: &TunnelDecomposition,
    tunnel: usize,
    p: &DualPath,
) -> (usize, usize) {
    let bfs = |start: FaceId, want_left: bool| -> usize {
        let mut dist = vec![usize::MAX; g.faces.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            let side_ok = match g.faces[f].side {
                crate::plane::Side::LeftUnbounded | crate::plane::Side::Bottom | crate::plane::Side::Top => want_left,
                crate::plane::Side::RightUnbounded => !want_left,
                crate::plane::Side::Bounded => false,
            };
            if side_ok {
                return dist[f];
            }
            for (nb, _) in g.face_neighbors(f) {
                if td.tunnel_of_face(g, nb) == tunnel && dist[nb] == usize::MAX {
                    dist[nb] = dist[f] + 1;
                    queue.push_back(nb);
                }
            }
        }
        usize::MAX
    };
    (bfs(p.faces[0], true), bfs(*p.faces.last().unwrap(), false))
}

/// One Monte Carlo trial row.
#[derive(Clone, Debug, serde::Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub success: bool,
    pub path_length: usize,
    pub num_a_events: usize,
    pub b_event: bool,
}

#[derive(Clone, Debug)]
pub struct MonteCarloStats {
    pub rows: Vec<TrialRow>,
    pub w: usize,
    pub trials: usize,
    pub seed: u64,
    pub success_rate: f64,
    pub blocked_rate: f64,
    pub mean_length: f64,
    pub length_percentiles: [usize; 3],
}

/// Seeded, per-trial-independent random colorings; each successful trial's
/// glued path is re-verified (validity and alternation) inside
/// `construct_thm3`.
pub fn monte_carlo(
    g: &PlaneGraph,
    w: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloStats> {
    if trials == 0 {
        return Err(Error::BadParameter("at least one trial required".into()));
    }
    // Reject the degenerate single-tunnel configuration up front.
    let td = TunnelDecomposition::new(g, w.min(g.n + 1))?;
    if td.tunnel_count < 2 {
        return Err(Error::Unsupported(format!(
            "w = {w} yields a single tunnel for n = {}",
            g.n
        )));
    }
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64 + 1);
        let colors: Vec<LineColor> = (0..g.n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    LineColor::Red
                } else {
                    LineColor::Blue
                }
            })
            .collect();
        let row = match Coloring::new(colors) {
            Err(_) => TrialRow {
                trial,
                success: false,
                path_length: 0,
                num_a_events: 0,
                b_event: false,
            },
            Ok(coloring) => {
                let r = construct_thm3(g, &coloring, w)?;
                TrialRow {
                    trial,
                    success: r.success,
                    path_length: r.glued.as_ref().map(|p| p.len()).unwrap_or(0),
                    num_a_events: r.a_events.len(),
                    b_event: r.b_event,
                }
            }
        };
        rows.push(row);
    }
    let succ = rows.iter().filter(|r| r.success).count();
    let blocked = rows
        .iter()
        .filter(|r| r.b_event || r.num_a_events > 0)
        .count();
    let mut lengths: Vec<usize> = rows
        .iter()
        .filter(|r| r.success)
        .map(|r| r.path_length)
        .collect();
    lengths.sort_unstable();
    let pct = |q: f64| -> usize {
        if lengths.is_empty() {
            0
        } else {
            lengths[((lengths.len() - 1) as f64 * q).round() as usize]
        }
    };
    Ok(MonteCarloStats {
        w,
        trials,
        seed,
        success_rate: succ as f64 / trials as f64,
        blocked_rate: blocked as f64 / trials as f64,
        mean_length: if lengths.is_empty() {
            0.0
        } else {
            lengths.iter().sum::<usize>() as f64 / lengths.len() as f64
        },
        length_percentiles: [pct(0.1), pct(0.5), pct(0.9)],
        rows,
    })
}

pub fn stats_to_csv(stats: &MonteCarloStats) -> String {
    let mut out = String::from("trial,success,path_length,num_a_events,b_event\n");
    for r in &stats.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial, r.success, r.path_length, r.num_a_events, r.b_event
        ));
    }
    out
}
