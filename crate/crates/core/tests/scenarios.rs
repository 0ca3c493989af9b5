use steklov::bounds::{evaluate_all, BoundName};
use steklov::explorer::{argmax_lambda2, check_subtree_monotonicity, enumerate_trees, tree_canonical_code};
use steklov::families::{balanced_tree, barbell, block_path, cherry, random_tree};
use steklov::oracle;
use steklov::rng::Rng;
use steklov::spectrum::steklov_spectrum;
use steklov::sphere::embedding_chain;
use steklov::GraphWithBoundary;

#[test]
fn block_path_six_meets_every_block_bound() {
    let g = block_path(6).unwrap().graph;
    let reports = evaluate_all(&g).unwrap();
    for name in [BoundName::BlockDegree, BoundName::BlockDegreeSharp, BoundName::BlockDiameter] {
        let r = reports.iter().find(|r| r.bound_name == name).unwrap();
        assert!(r.applicable && r.satisfied, "{r:?}");
        assert!((r.lambda2 - 1.0 / 3.0).abs() < 1e-12);
    }
}

#[test]
fn cherry_on_a_star_has_unit_lambda2() {
    let star = GraphWithBoundary::with_leaf_boundary(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let g = cherry(&star, 1).unwrap().graph;
    let planar = evaluate_all(&g).unwrap().into_iter().find(|r| r.bound_name == BoundName::PlanarDegree).unwrap();
    assert!(planar.satisfied);
    assert!((planar.lambda2 - 1.0).abs() < 1e-12);
}

#[test]
fn non_planar_non_block_graph_has_no_applicable_bound() {
    // K_{3,3} with a pendant on each vertex of one side.
    let mut edges: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
    edges.extend([(0, 6), (1, 7), (2, 8)]);
    let g = GraphWithBoundary::new(9, edges, [6, 7, 8]).unwrap();
    assert!(evaluate_all(&g).unwrap().iter().all(|r| !r.applicable));
}

#[test]
fn irreducible_counts_match_both_prufer_oracles() {
    for l in 2..=6 {
        for d in 3..=5 {
            let mine: Vec<String> = enumerate_trees(l, d, false, None).unwrap().iter().map(|e| e.canonical_code.clone()).collect();
            let skeleton = oracle::irreducible_trees_skeleton_prufer(l, d);
            assert_eq!(mine.len(), skeleton.len(), "l={l} D={d}");
            if l <= 5 {
                assert_eq!(oracle::irreducible_trees_full_prufer(l, d), skeleton, "l={l} D={d}");
            }
        }
    }
}

#[test]
fn catalog_maximum_dominates_every_entry() {
    let r = argmax_lambda2(7, 4).unwrap();
    assert!(r.entries.iter().all(|e| e.lambda2 <= r.summary.max_lambda2 + 1e-12));
    assert!(!r.summary.maximizers.is_empty());
    assert!(r.entries.windows(2).all(|w| w[0].canonical_code < w[1].canonical_code));
}

#[test]
fn balanced_tree_is_irreducible_with_the_requested_shape() {
    for l in 3..=10 {
        for d in 3..=5 {
            let t = balanced_tree(l, d).unwrap().graph;
            assert_eq!(t.boundary_len(), l);
            assert!(t.max_degree() <= d);
            assert!((0..t.n()).all(|v| t.degree(v) != 2));
            let codes: Vec<String> = enumerate_trees(l, d, false, None).unwrap().into_iter().map(|e| e.canonical_code).collect();
            assert!(codes.contains(&tree_canonical_code(&t)));
        }
    }
}

#[test]
fn barbell_dominates_its_central_path() {
    let t = barbell(2, 2, 4).unwrap();
    // Leaf, hub, middle, hub, leaf: a path of length 4.
    let sub = vec![0, 1, 2, t.roles["u_pendants"][0], t.roles["v_pendants"][0]];
    let r = check_subtree_monotonicity(&t.graph, &sub).unwrap();
    assert!(r.holds() && r.k_checked == 2);
    // k = 1 compares 0 with 0; k = 2 compares 1/3 with 1/2.
    assert!(r.max_excess.abs() < 1e-12);
    let path = GraphWithBoundary::with_leaf_boundary(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
    assert!((steklov_spectrum(&path).unwrap().lambda2() - 0.5).abs() < 1e-12);
}

#[test]
fn random_subtrees_dominate_their_hosts() {
    for seed in 0..30 {
        let t = random_tree(20, 4, seed).unwrap().graph;
        let mut rng = Rng::new(seed);
        let mut chosen = vec![rng.below(20)];
        let target = rng.range(2, 20);
        while chosen.len() < target {
            let frontier: Vec<usize> = chosen
                .iter()
                .flat_map(|&v| t.neighbors(v).to_vec())
                .filter(|w| !chosen.contains(w))
                .collect();
            chosen.push(frontier[rng.below(frontier.len())]);
        }
        assert!(check_subtree_monotonicity(&t, &chosen).unwrap().holds());
    }
}

#[test]
fn barbell_embedding_chain_holds() {
    let g = barbell(2, 2, 4).unwrap().graph;
    let c = embedding_chain(&g).unwrap().certificate;
    assert!(c.lambda2 <= c.embedding_ratio && c.embedding_ratio <= c.planar_bound);
    assert!(c.centering_residual <= 1e-6 * c.boundary_len as f64);
}

#[test]
fn observation_gap_is_one_thirty_fifth() {
    let a = steklov_spectrum(&barbell(2, 4, 3).unwrap().graph).unwrap().lambda2();
    let b = steklov_spectrum(&barbell(3, 3, 3).unwrap().graph).unwrap().lambda2();
    assert!((a - b - 1.0 / 35.0).abs() < 1e-12);
}
