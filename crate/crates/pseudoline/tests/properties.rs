//! Property tests over randomly generated diagrams.

use proptest::prelude::*;
use pseudoline::dual::DualGraph;
use pseudoline::plane::PlaneGraph;
use pseudoline::tunnel::TunnelDecomposition;
use pseudoline::wiring::{gen_random_wiring, WiringDiagram};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The random generator always emits a valid full reduced word.
    #[test]
    fn random_wiring_is_valid(n in 1usize..14, seed in 0u64..10_000) {
        let d = gen_random_wiring(n, seed);
        prop_assert!(d.is_full());
        prop_assert!(WiringDiagram::new(n, d.crossings().to_vec()).is_ok());
    }

    /// Counting identities hold for every generated diagram.
    #[test]
    fn counting_identities(n in 1usize..12, seed in 0u64..10_000) {
        let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
        prop_assert_eq!(g.vertices.len(), n * (n - 1) / 2);
        prop_assert_eq!(g.edges.len(), n * n);
        prop_assert_eq!(g.faces.len(), n * (n - 1) / 2 + n + 1);
    }

    /// Level parity is a proper 2-coloring of the dual graph, and the
    /// face level equals the shortest dual distance to the bottom face.
    #[test]
    fn level_is_bfs_distance_to_bottom(n in 1usize..11, seed in 0u64..10_000) {
        let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
        let dual = DualGraph::build(&g);
        dual.check_bipartite_by_level(&g).unwrap();
        // independent oracle: plain BFS from the bottom face
        let mut dist = vec![usize::MAX; g.faces.len()];
        dist[g.bottom_face()] = 0;
        let mut queue = std::collections::VecDeque::from([g.bottom_face()]);
        while let Some(f) = queue.pop_front() {
            for &(nb, _) in dual.neighbors(f) {
                if dist[nb] == usize::MAX {
                    dist[nb] = dist[f] + 1;
                    queue.push_back(nb);
                }
            }
        }
        for f in 0..g.faces.len() {
            prop_assert_eq!(dist[f], g.faces[f].level);
        }
    }

    /// Wiring text round-trips byte-exactly.
    #[test]
    fn wiring_text_round_trip(n in 1usize..12, seed in 0u64..10_000) {
        let d = gen_random_wiring(n, seed);
        let text = d.to_text(None);
        let (d2, _) = WiringDiagram::parse(&text).unwrap();
        prop_assert_eq!(text, d2.to_text(None));
    }

    /// Wall orders are total: every wall's edges chain left to right, and
    /// the leftmost wall edge of a face is unique.
    #[test]
    fn wall_order_is_total(n in 2usize..11, seed in 0u64..10_000, w in 1usize..4) {
        let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
        let w = w.min(n + 1);
        let td = TunnelDecomposition::new(&g, w).unwrap();
        for wall in &td.walls {
            for pair in wall.edges.windows(2) {
                prop_assert!(td.wall_pos[pair[0]] < td.wall_pos[pair[1]]);
            }
        }
        for f in 0..g.faces.len() {
            if let Some(&first) = td.face_wall_edges[f].first() {
                for &e in td.face_wall_edges[f].iter().skip(1) {
                    prop_assert!(td.wall_pos[first] < td.wall_pos[e]);
                }
            }
        }
    }

    /// In-tunnel degree of every bad face is one (its tunnel neighbor).
    #[test]
    fn bad_faces_are_leaves(n in 2usize..11, seed in 0u64..10_000) {
        let g = PlaneGraph::build(&gen_random_wiring(n, seed)).unwrap();
        for offset in 0..2usize {
            let td = TunnelDecomposition::with_offset(&g, 2, offset).unwrap();
            for f in 0..g.faces.len() {
                if td.bad[f] {
                    let t = td.tunnel_of_face(&g, f);
                    let deg = td
                        .tunnel_neighbors(&g, f)
                        .iter()
                        .filter(|(nb, _)| td.tunnel_of_face(&g, *nb) == t)
                        .count();
                    prop_assert_eq!(deg, 1);
                }
            }
        }
    }
}
