//! Hand-checked fixtures for the discharging machinery.

use pseudoline::longpath::{head_rule_targets, initial_charge, initial_family, step1};
use pseudoline::plane::PlaneGraph;
use pseudoline::tunnel::TunnelDecomposition;
use pseudoline::wiring::WiringDiagram;

/// 5-line fixture (word 2 3 1 2 3 4 3 2 1 2). Its initial family leaves
/// the adjacent bad pair {7, 9} untraversed. Face 7 opens at the second
/// crossing as the face east of the swap in gap 3 and closes at the
/// fifth; its leftmost wall edge is edge 7 (created by that second
/// crossing, separating it from face 6), whose right endpoint is vertex 3
/// with faces (S,W,N,E) = (8,6,7,9). Face 7 is the north face there, so
/// its vertex charge crosses to the south face 8.
fn fixture() -> (PlaneGraph, TunnelDecomposition) {
    let d = WiringDiagram::new(5, vec![2, 3, 1, 2, 3, 4, 3, 2, 1, 2]).unwrap();
    let g = PlaneGraph::build(&d).unwrap();
    let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
    (g, td)
}

#[test]
fn head_rule_targets_match_the_manual_trace() {
    let (g, td) = fixture();
    let fam = initial_family(&g, &td).unwrap();
    let charged = fam.bounded_untraversed(&g);
    assert_eq!(charged, vec![7, 9]);

    let (edge_target, vertex_target, via_edge, via_vertex) =
        head_rule_targets(&g, &td, 7).unwrap();
    assert_eq!((edge_target, vertex_target), (6, 8));
    assert_eq!((via_edge, via_vertex), (7, 3));
    assert_eq!(g.vertex_faces(3), [8, 6, 7, 9]);

    let (edge_target, vertex_target, via_edge, via_vertex) =
        head_rule_targets(&g, &td, 9).unwrap();
    assert_eq!((edge_target, vertex_target), (7, 4));
    assert_eq!((via_edge, via_vertex), (12, 4));

    // both targets lie in a tunnel adjacent to the sender's
    for f in [7usize, 9] {
        let (et, vt, _, _) = head_rule_targets(&g, &td, f).unwrap();
        let tf = td.tunnel_of_face(&g, f);
        assert_eq!(td.tunnel_of_face(&g, et).abs_diff(tf), 1);
        assert_eq!(td.tunnel_of_face(&g, vt).abs_diff(tf), 1);
        assert!(!td.bad[vt], "vertex target is good");
    }
}

#[test]
fn step_1a_inserts_the_bad_pair_and_deletes_its_charge() {
    let (g, td) = fixture();
    let fam = initial_family(&g, &td).unwrap();
    let ledger = initial_charge(&g, &td, &fam).unwrap();
    assert_eq!(ledger.total_charge(), 4);
    let (fam1, ledger1) = step1(&g, &td, fam, ledger).unwrap();
    // exactly one detour: faces 7 and 9 inserted between 6 and 8
    assert_eq!(ledger1.insertions.len(), 1);
    let ins = &ledger1.insertions[0];
    assert_eq!((ins.b1, ins.b2), (7, 9));
    assert_eq!(ins.replaced, (6, 8));
    assert!(fam1.traversed[7] && fam1.traversed[9]);
    assert_eq!(ledger1.total_charge(), 0);
}

#[test]
fn arrangement_without_adjacent_bad_faces_is_untouched_by_step_1() {
    // every untraversed component is a single face: step 1 changes nothing
    for seed in 0..60u64 {
        let d = pseudoline::wiring::gen_random_wiring(6, seed);
        let g = PlaneGraph::build(&d).unwrap();
        let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
        let fam = initial_family(&g, &td).unwrap();
        let comps = pseudoline::longpath::family::check_untraversed_paths(&g, &fam).unwrap();
        if comps.iter().any(|c| c.len() > 1) {
            continue;
        }
        let ledger = initial_charge(&g, &td, &fam).unwrap();
        let before = fam.paths.clone();
        let (fam1, ledger1) = step1(&g, &td, fam, ledger).unwrap();
        assert_eq!(fam1.paths, before, "seed {seed}");
        assert!(ledger1.insertions.is_empty());
        return;
    }
    panic!("no 6-line diagram with only isolated untraversed faces");
}
