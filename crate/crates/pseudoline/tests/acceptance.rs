//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The corpus is seeded and fixed: 100 random diagrams per n in 3..=12,
//! plus 10 per n in 13..=30 for the pipeline criterion.

use pseudoline::bicolored::{
    build_directed_dual, construct_thm3, monte_carlo, reach, stats_to_csv, verify_reach_boundary,
    Coloring,
};
use pseudoline::dual::DualGraph;
use pseudoline::geom::gen_theorem2;
use pseudoline::longpath::{
    claim_length_check, glue, initial_family, run_pipeline, upper_bound_bipartite, PipelineResult,
};
use pseudoline::oracle::{
    longest_alternating, longest_path, SearchBudget, Thm2Certification,
};
use pseudoline::path::verify_path;
use pseudoline::plane::{PlaneGraph, UnboundedSide};
use pseudoline::tunnel::{check_tunnel_caterpillar, TunnelDecomposition};
use pseudoline::wiring::{gen_random_wiring, LineColor, WiringDiagram};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const CORPUS_SEED_BASE: u64 = 1000;

fn corpus(n: usize, count: usize) -> Vec<WiringDiagram> {
    (0..count)
        .map(|i| gen_random_wiring(n, CORPUS_SEED_BASE + i as u64))
        .collect()
}

fn pass(criterion: &str, detail: String, t0: Instant) {
    println!("acceptance {criterion}: PASS — {detail} ({:?})", t0.elapsed());
}

#[test]
fn criterion_01_counting_identities() {
    let t0 = Instant::now();
    let mut checked = 0;
    for n in 3..=12 {
        for d in corpus(n, 100) {
            let g = PlaneGraph::build(&d).expect("full diagram builds");
            assert_eq!(g.vertices.len(), n * (n - 1) / 2, "V at n={n}");
            assert_eq!(g.edges.len(), n * n, "E at n={n}");
            assert_eq!(g.faces.len(), n * (n - 1) / 2 + n + 1, "F at n={n}");
            assert_eq!(g.unbounded_faces().count(), 2 * n, "U at n={n}");
            // two unbounded faces per level, with the endpoint identifications
            let mut distinct = std::collections::BTreeSet::new();
            for level in 0..=n {
                let l = g.unbounded_face(UnboundedSide::Left, level).unwrap();
                let r = g.unbounded_face(UnboundedSide::Right, level).unwrap();
                distinct.insert(l);
                distinct.insert(r);
                if level == 0 || level == n {
                    assert_eq!(l, r);
                } else {
                    assert_ne!(l, r);
                }
            }
            assert_eq!(distinct.len(), 2 * n);
            checked += 1;
        }
    }
    pass("1 (counting identities)", format!("{checked} diagrams"), t0);
}

#[test]
fn criterion_02_structure_suite() {
    let t0 = Instant::now();
    let mut checked = 0;
    for n in 3..=12 {
        for d in corpus(n, 100) {
            let g = PlaneGraph::build(&d).unwrap();
            let td = TunnelDecomposition::new(&g, 2).unwrap();
            for t in 0..td.tunnel_count {
                check_tunnel_caterpillar(&g, &td, t).expect("caterpillar per tunnel");
            }
            for f in 0..g.faces.len() {
                if td.bad[f] {
                    let tnb = td.tnb[f].expect("unique tunnel neighbor");
                    assert!(!td.bad[tnb], "tnb of a bad face is good");
                    if g.faces[f].is_bounded() {
                        for h in 0..g.faces.len() {
                            assert!(
                                h == f || !pseudoline::tunnel::is_nested(&td, &g, f, h),
                                "bounded bad face {f} nested in {h}"
                            );
                        }
                    }
                }
            }
            // no two adjacent bounded degree-3 faces
            for e in &g.edges {
                let (a, b) = e.faces();
                assert!(
                    !(g.faces[a].is_bounded()
                        && g.faces[b].is_bounded()
                        && g.faces[a].degree() == 3
                        && g.faces[b].degree() == 3),
                    "adjacent bounded degree-3 faces {a},{b}"
                );
            }
            // the untraversed faces of the initial family induce a
            // disjoint union of paths
            let shifted = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
            let fam = initial_family(&g, &shifted).unwrap();
            pseudoline::longpath::family::check_untraversed_paths(&g, &fam)
                .expect("untraversed faces form paths");
            checked += 1;
        }
    }
    pass("2 (structure suite)", format!("{checked} diagrams, w=2"), t0);
}

#[test]
fn criterion_03_theorem1_pipeline() {
    let t0 = Instant::now();
    let mut checked = 0;
    let mut worst_slack = i64::MAX;
    for n in 8..=30 {
        let count = if n <= 12 { 100 } else { 10 };
        for d in corpus(n, count) {
            let g = PlaneGraph::build(&d).unwrap();
            // run_pipeline re-validates the final path and audits
            // (1)-(4), (P1)-(P3), (Q1)-(Q4) internally and fails loudly.
            let r = run_pipeline(&g).expect("pipeline with audits");
            let bound = PipelineResult::length_bound(n);
            let len = r.final_path.faces.len() as i64;
            assert!(len >= bound, "n={n}: |P*|={len} < {bound}");
            worst_slack = worst_slack.min(len - bound);
            checked += 1;
        }
    }
    pass(
        "3 (theorem-1 pipeline)",
        format!("{checked} diagrams, min slack over bound = {worst_slack}"),
        t0,
    );
}

#[test]
fn criterion_04_initial_family_bounds() {
    let t0 = Instant::now();
    let mut checked = 0;
    for n in 3..=12 {
        for d in corpus(n, 100) {
            let g = PlaneGraph::build(&d).unwrap();
            let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
            let fam = initial_family(&g, &td).unwrap();
            let total: i64 = fam.paths.iter().map(|p| p.faces.len() as i64).sum();
            let bound = (n * n) as i64 / 4 - n as i64;
            assert!(total >= bound, "n={n}: sum {total} < {bound}");
            for p in &fam.paths {
                assert!(
                    claim_length_check(&g, p).unwrap(),
                    "endpoint length claim fails at n={n}"
                );
            }
            checked += 1;
        }
    }
    pass("4 (initial-family bounds)", format!("{checked} diagrams"), t0);
}

#[test]
fn criterion_05_exponential_gluing() {
    let t0 = Instant::now();
    // fixed 8-line diagram on which all 6 two-element subsets glue
    let d = gen_random_wiring(8, 3);
    let g = PlaneGraph::build(&d).unwrap();
    let td = TunnelDecomposition::with_offset(&g, 2, 1).unwrap();
    let fam = initial_family(&g, &td).unwrap();
    let mut glued = Vec::new();
    for i in 1..=4usize {
        for j in i + 1..=4 {
            let p = glue(&g, &fam, Some(&[i, j])).expect("subset glues");
            assert!(verify_path(&g, &p, None).is_empty(), "subset {{{i},{j}}} valid");
            glued.push(p);
        }
    }
    assert_eq!(glued.len(), 6);
    let mut dedup = glued.clone();
    dedup.sort_by(|a, b| a.faces.cmp(&b.faces));
    dedup.dedup();
    assert_eq!(dedup.len(), 6, "all six glued paths distinct");
    pass("5 (exponential gluing)", "6 of 6 subsets valid and distinct".into(), t0);
}

#[test]
fn criterion_06_oracle_dominance() {
    let t0 = Instant::now();
    let mut checked = 0;
    for n in 2..=6 {
        for d in corpus(n, 8) {
            let g = PlaneGraph::build(&d).unwrap();
            let dg = DualGraph::build(&g);
            let out = longest_path(&g, &dg, &SearchBudget::default());
            assert!(out.is_exact(), "search complete at n={n}");
            assert!(verify_path(&g, out.witness(), None).is_empty());
            let built = run_pipeline(&g).unwrap();
            assert!(
                out.length() >= built.final_path.faces.len(),
                "oracle dominates construction at n={n}"
            );
            assert!(out.length() <= upper_bound_bipartite(&g));
            checked += 1;
        }
    }
    pass("6 (oracle dominance)", format!("{checked} diagrams, n <= 6"), t0);
}

#[test]
fn criterion_07_theorem2_extremal_bound() {
    let t0 = Instant::now();
    let mut details = Vec::new();
    for k in [1usize, 3] {
        let inst = gen_theorem2(k).expect("instance generates");
        let wb = inst.workbench().expect("workbench");
        let coloring = Coloring::new(wb.colors.clone()).unwrap();
        let dd = build_directed_dual(&wb.plane, &coloring).unwrap();
        let cert = Thm2Certification::from_workbench(&wb);
        let out = longest_alternating(&wb.plane, &dd, &coloring, &SearchBudget::default(), Some(&cert))
            .expect("certified search");
        assert!(out.is_exact(), "incomplete search is a failure (k={k})");
        assert!(
            out.length() <= 14 * k,
            "k={k}: longest alternating {} > 14k",
            out.length()
        );
        assert!(verify_path(&wb.plane, out.witness(), Some(&coloring.0)).is_empty());
        details.push(format!("k={k}: max={} <= {}", out.length(), 14 * k));
    }
    pass("7 (theorem-2 extremal bound)", details.join(", "), t0);
}

#[test]
fn criterion_08_theorem2_structure() {
    let t0 = Instant::now();
    let mut details = Vec::new();
    for k in [1usize, 3] {
        let inst = gen_theorem2(k).unwrap();
        // incidences of the red sub-arrangement (exact)
        inst.polygon.check_crossings_on_axes().expect("crossings on auxiliary lines");
        inst.polygon.check_crossings_distinct().expect("red crossings distinct");
        // slab budget
        let counts = inst.red_lines_per_sector();
        let budget = (3 * k - 1) / 2;
        for (t, &c) in counts.iter().enumerate() {
            assert!(c <= budget, "k={k}: sector {t} crossed by {c} > {budget} reds");
        }
        // slab separation: among bicolored faces, no component of the
        // dual graph minus the middle part touches two marked slabs
        let wb = inst.workbench().unwrap();
        let g = &wb.plane;
        let bicolored: Vec<bool> = (0..g.faces.len())
            .map(|f| {
                let mut reds = false;
                let mut blues = false;
                for e in g.faces[f].boundary_edges() {
                    match wb.colors[g.edges[e].line] {
                        LineColor::Red => reds = true,
                        LineColor::Blue => blues = true,
                    }
                }
                reds && blues
            })
            .collect();
        let allowed: Vec<bool> = (0..g.faces.len())
            .map(|f| {
                bicolored[f]
                    && !matches!(wb.face_class[f], pseudoline::geom::FaceClass::Middle)
            })
            .collect();
        let mut seen = vec![false; g.faces.len()];
        for f0 in 0..g.faces.len() {
            if !allowed[f0] || seen[f0] {
                continue;
            }
            let mut stack = vec![f0];
            seen[f0] = true;
            let mut slabs = std::collections::BTreeSet::new();
            while let Some(f) = stack.pop() {
                if let pseudoline::geom::FaceClass::Marked(t) = wb.face_class[f] {
                    slabs.insert(t % (3 * k));
                }
                for (nb, _) in g.face_neighbors(f) {
                    if allowed[nb] && !seen[nb] {
                        seen[nb] = true;
                        stack.push(nb);
                    }
                }
            }
            assert!(
                slabs.len() <= 1,
                "k={k}: bicolored component outside the middle part touches slabs {slabs:?}"
            );
        }
        details.push(format!("k={k}: budget {budget} per sector"));
    }
    pass("8 (theorem-2 structure)", details.join(", "), t0);
}

#[test]
fn criterion_09_theorem3_randomized() {
    let t0 = Instant::now();
    let n = 60usize;
    let g = PlaneGraph::build(&gen_random_wiring(n, 4242)).unwrap();
    // w = 6 * ceil(log2 n) + 3
    let w = 6 * (usize::BITS - (n - 1).leading_zeros()) as usize + 3;
    assert_eq!(w, 39);
    let stats = monte_carlo(&g, w, 200, 1).unwrap();
    assert!(stats.success_rate > 0.0, "success rate strictly positive");

    // every successful trial re-verifies its glued path inside
    // construct_thm3; additionally check the per-instance constructive
    // bound on middle tunnels at the widths used for monotonicity
    let mut bound_checked = 0usize;
    for w_check in [8usize, 16] {
        let td = TunnelDecomposition::new(&g, w_check).unwrap();
        let l = td.tunnel_count - 1;
        let (mid_lo, mid_hi) = (l.div_ceil(3), 2 * l / 3);
        for trial in 0..200u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            rng.set_stream(trial + 1);
            let colors: Vec<LineColor> = (0..n)
                .map(|_| if rng.gen_bool(0.5) { LineColor::Red } else { LineColor::Blue })
                .collect();
            let Ok(c) = Coloring::new(colors) else { continue };
            let r = construct_thm3(&g, &c, w_check).unwrap();
            if !r.success {
                continue;
            }
            for (idx, p) in r.tunnel_paths.iter().enumerate() {
                let i = idx + 1;
                if i < mid_lo || i > mid_hi {
                    continue;
                }
                let len = p.as_ref().unwrap().len() as i64;
                assert!(
                    len + 4 * w_check as i64 >= 2 * i as i64 * (w_check as i64 - 1),
                    "middle tunnel {i} of w={w_check} violates the length accounting"
                );
                bound_checked += 1;
            }
        }
    }
    // blocking monotone in w
    let s8 = monte_carlo(&g, 8, 200, 1).unwrap();
    let s16 = monte_carlo(&g, 16, 200, 1).unwrap();
    assert!(
        s16.blocked_rate <= s8.blocked_rate,
        "blocking at w=16 ({}) exceeds w=8 ({})",
        s16.blocked_rate,
        s8.blocked_rate
    );
    pass(
        "9 (theorem-3 randomized)",
        format!(
            "success@w=39 {:.2}, blocked w16 {:.3} <= w8 {:.3}, {} middle-tunnel bounds",
            stats.success_rate, s16.blocked_rate, s8.blocked_rate, bound_checked
        ),
        t0,
    );
}

#[test]
fn criterion_10_reach_boundary_law() {
    let t0 = Instant::now();
    let mut samples = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    'outer: for round in 0.. {
        for n in 4..=20 {
            let d = gen_random_wiring(n, 5000 + round * 100 + n as u64);
            let g = PlaneGraph::build(&d).unwrap();
            let colors: Vec<LineColor> = (0..n)
                .map(|_| if rng.gen_bool(0.5) { LineColor::Red } else { LineColor::Blue })
                .collect();
            let Ok(c) = Coloring::new(colors) else { continue };
            let dd = build_directed_dual(&g, &c).unwrap();
            for _ in 0..4 {
                let z = rng.gen_range(0..g.faces.len());
                let set = reach(&dd, z).unwrap();
                verify_reach_boundary(&g, &c, &set).expect("boundary law");
                samples += 1;
                if samples >= 1000 {
                    break 'outer;
                }
            }
        }
    }
    pass("10 (reach boundary law)", format!("{samples} reach computations"), t0);
}

#[test]
fn criterion_11_determinism() {
    let t0 = Instant::now();
    // byte-identical artifacts across repeated runs with fixed seeds
    let d1 = gen_random_wiring(10, 77);
    let d2 = gen_random_wiring(10, 77);
    assert_eq!(d1.to_text(None), d2.to_text(None));

    let g = PlaneGraph::build(&d1).unwrap();
    let p1 = run_pipeline(&g).unwrap().final_path.to_text();
    let p2 = run_pipeline(&g).unwrap().final_path.to_text();
    assert_eq!(p1, p2);

    let g60 = PlaneGraph::build(&gen_random_wiring(24, 4242)).unwrap();
    let csv1 = stats_to_csv(&monte_carlo(&g60, 6, 50, 9).unwrap());
    let csv2 = stats_to_csv(&monte_carlo(&g60, 6, 50, 9).unwrap());
    assert_eq!(csv1, csv2);

    let inst1 = gen_theorem2(1).unwrap();
    let inst2 = gen_theorem2(1).unwrap();
    let w1 = inst1.to_wiring().unwrap();
    let w2 = inst2.to_wiring().unwrap();
    assert_eq!(w1.0.to_text(Some(&w1.1)), w2.0.to_text(Some(&w2.1)));

    let spec = pseudoline::render::RenderSpec::default();
    let svg1 = pseudoline::render::render(&d1, &g, &spec).unwrap();
    let svg2 = pseudoline::render::render(&d1, &g, &spec).unwrap();
    assert_eq!(svg1, svg2);

    pass("11 (determinism)", "wiring, pipeline, monte-carlo CSV, thm2, SVG".into(), t0);
}
