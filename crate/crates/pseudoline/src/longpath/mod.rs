//! The long-path pipeline: an initial glueable family of tunnel paths, a
//! charging pass, two rerouting/discharging steps with always-on audits,
//! and the final gluing. The audited conditions force at least
//! `2|F|/3 - 4|U|/3` bounded faces onto the final path.

pub mod charge;
pub mod family;
pub mod steps;

pub use charge::{head_rule_targets, initial_charge, ChargeLedger};
pub use family::{audit_initial_family, glue, initial_family, PathFamily, Phase};
pub use steps::{audit_final_conditions, step1, step2};

use crate::error::{Error, Result};
use crate::path::{verify_path, DualPath};
use crate::plane::{FaceId, PlaneGraph, Side};
use crate::tunnel::TunnelDecomposition;

/// Everything a pipeline run produces, audits included.
pub struct PipelineResult {
    pub tunnels: TunnelDecomposition,
    pub initial: PathFamily,
    pub family: PathFamily,
    pub ledger: ChargeLedger,
    pub final_path: DualPath,
    /// Lengths of the initial tunnel paths.
    pub initial_lengths: Vec<usize>,
    pub traversed_bounded: usize,
}

impl PipelineResult {
    /// `(n^2 - 7n + 2) / 3`, the guaranteed final length, rounded up.
    pub fn length_bound(n: usize) -> i64 {
        let n = n as i64;
        let num = n * n - 7 * n + 2;
        num.div_euclid(3)
    }
}

/// Runs the whole construction on a full simple arrangement.
pub fn run_pipeline(g: &PlaneGraph) -> Result<PipelineResult> {
    let td = TunnelDecomposition::with_offset(g, 2, 1)?;
    let initial = initial_family(g, &td)?;
    audit_initial_family(g, &td, &initial)?;
    let initial_lengths: Vec<usize> = initial.paths.iter().map(|p| p.faces.len()).collect();
    let ledger = initial_charge(g, &td, &initial)?;
    let (family, ledger) = step1(g, &td, initial.clone(), ledger)?;
    let (family, ledger) = step2(g, &td, &initial, family, ledger)?;
    let final_path = glue(g, &family, None)?;
    let violations = verify_path(g, &final_path, None);
    if !violations.is_empty() {
        return Err(Error::internal(format!(
            "final path invalid: {}",
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    let traversed_bounded = family.bounded_traversed(g).len();

    // The final accounting: conditions (1)-(4) give 2|N| <= |T| + 2|U|,
    // hence |T| >= 2|F|/3 - 4|U|/3.
    let faces = g.faces.len() as i64;
    let unbounded = g.unbounded_faces().count() as i64;
    let bound3 = 2 * faces - 4 * unbounded; // 3*|T| must be at least this
    if 3 * (traversed_bounded as i64) < bound3 {
        return Err(Error::audit(
            format!(
                "traversed bounded faces {traversed_bounded} below 2|F|/3 - 4|U|/3 = {}/3",
                bound3
            ),
            ledger.events.iter().map(|e| e.to_string()).collect(),
        ));
    }
    if (final_path.faces.len() as i64) < PipelineResult::length_bound(g.n) {
        return Err(Error::audit(
            format!(
                "final path length {} below bound {}",
                final_path.faces.len(),
                PipelineResult::length_bound(g.n)
            ),
            ledger.events.iter().map(|e| e.to_string()).collect(),
        ));
    }

    Ok(PipelineResult {
        tunnels: td,
        initial,
        family,
        ledger,
        final_path,
        initial_lengths,
        traversed_bounded,
    })
}

/// Upper bound on any dual path length from bipartiteness: every second
/// visited face has even level.
pub fn upper_bound_bipartite(g: &PlaneGraph) -> usize {
    let even = g.faces.iter().filter(|f| f.level % 2 == 0).count();
    let odd = g.faces.len() - even;
    2 * even.min(odd) + 1
}

/// Claim check for a path between unbounded faces: a path from `l_i` to
/// `r_j` has at least `i+j+1` faces when `i,j <= n/2` and at least
/// `2n-i-j+1` when `i,j >= n/2`. Mixed endpoint levels pass vacuously.
pub fn claim_length_check(g: &PlaneGraph, p: &DualPath) -> Result<bool> {
    let (first, last) = match (p.first(), p.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(true),
    };
    for f in [first, last] {
        if g.faces[f].side == Side::Bounded {
            return Err(Error::BadParameter(format!("endpoint {f} is bounded")));
        }
    }
    let i = g.faces[first].level;
    let j = g.faces[last].level;
    let n = g.n;
    let len = p.faces.len();
    if 2 * i <= n && 2 * j <= n && len < i + j + 1 {
        return Ok(false);
    }
    if 2 * i >= n && 2 * j >= n && len + i + j < 2 * n + 1 {
        return Ok(false);
    }
    Ok(true)
}

/// Convenience: the faces of `p` restricted to bounded ones.
pub fn bounded_len(g: &PlaneGraph, p: &DualPath) -> usize {
    p.faces.iter().filter(|&&f| g.faces[f].is_bounded()).count()
}

#[allow(unused)]
fn _assert_face_id_type(f: FaceId) -> usize {
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wiring::{gen_random_wiring, WiringDiagram};

    #[test]
    fn pipeline_on_two_lines() {
        let g = PlaneGraph::build(&WiringDiagram::new(2, vec![1]).unwrap()).unwrap();
        let r = run_pipeline(&g).unwrap();
        assert_eq!(r.final_path.faces.len(), 2);
        assert_eq!(r.ledger.total_charge(), 0);
    }

    #[test]
    fn pipeline_on_random_corpus() {
        for seed in 0..15 {
            for n in 2..=12 {
                let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
                let r = run_pipeline(&g)
                    .unwrap_or_else(|e| panic!("pipeline failed for n={n} seed={seed}: {e}"));
                assert!(
                    (r.final_path.faces.len() as i64) >= PipelineResult::length_bound(n),
                    "n={n} seed={seed}"
                );
            }
        }
    }

    #[test]
    fn claim_check_on_initial_paths() {
        for seed in 0..10 {
            for n in 2..=11 {
                let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
                let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
                let fam = initial_family(&g, &td).unwrap();
                for p in &fam.paths {
                    assert!(claim_length_check(&g, p).unwrap(), "n={n} seed={seed}");
                }
            }
        }
    }

    #[test]
    fn upper_bound_is_loose_for_single_line() {
        let g = PlaneGraph::build(&WiringDiagram::new(1, vec![]).unwrap()).unwrap();
        assert_eq!(upper_bound_bipartite(&g), 3);
    }
}
