mod common;

use common::{exact_greedy_split, raw_cut_gain, unlabeled};
use featboost::data::{bin_features, compute_bins, BinnedMatrix, LabeledDataset};
use featboost::tree::{
    best_split_histogram, grow_leaf_wise, grow_level_wise, grow_oblivious, GradPair, Node,
    TreeParams,
};
use proptest::prelude::*;

fn binned(ds: &LabeledDataset) -> BinnedMatrix {
    let bins = compute_bins(ds, 256).unwrap();
    bin_features(ds, &bins).unwrap()
}

fn all_rows(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn unit_hessian(g: &[f64]) -> Vec<GradPair> {
    g.iter().map(|&g| GradPair::new(g, 1.0)).collect()
}

#[test]
fn level_wise_depth_zero_is_a_single_leaf() {
    let ds = unlabeled(&[vec![1.0], vec![2.0], vec![3.0]]);
    let grads = unit_hessian(&[1.0, 2.0, -0.5]);
    let params = TreeParams {
        max_depth: 0,
        ..TreeParams::default()
    };
    let tree = grow_level_wise(&binned(&ds), &grads, &all_rows(3), &params);
    // w* = -(2.5) / (3 + 1)
    assert_eq!(tree.nodes(), [Node::Leaf { weight: -0.625 }]);
}

#[test]
fn level_wise_separates_unbalanced_xor() {
    // Quadrant (0,0) holds two negatives so the root has a positive-gain cut;
    // a perfectly balanced XOR has zero gain at every root cut.
    let rows = vec![
        vec![0.0, 0.0],
        vec![0.0, 0.0],
        vec![0.0, 1.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
    ];
    let labels = [0u8, 0, 1, 1, 0];
    let ds = unlabeled(&rows);
    let grads: Vec<GradPair> = labels
        .iter()
        .map(|&y| GradPair::new(0.5 - y as f64, 0.25))
        .collect();
    let params = TreeParams {
        max_depth: 2,
        ..TreeParams::default()
    };
    let tree = grow_level_wise(&binned(&ds), &grads, &all_rows(5), &params);
    assert_eq!(tree.n_leaves(), 4);
    assert_eq!(tree.depth(), 2);
    for (row, &y) in rows.iter().zip(&labels) {
        let w = tree.predict(row).unwrap();
        assert_eq!(w > 0.0, y == 1, "row {row:?} weight {w}");
    }
    // root: tie between the two features goes to feature 0
    assert!(matches!(tree.nodes()[0], Node::Split { feature: 0, .. }));
}

#[test]
fn level_wise_first_cut_at_class_boundary() {
    let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let labels: Vec<u8> = xs.iter().map(|&x| u8::from(x >= 6.0)).collect();
    let ds = unlabeled(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>());
    let grads: Vec<GradPair> = labels
        .iter()
        .map(|&y| GradPair::new(0.5 - y as f64, 0.25))
        .collect();
    let params = TreeParams {
        max_depth: 3,
        ..TreeParams::default()
    };
    let tree = grow_level_wise(&binned(&ds), &grads, &all_rows(10), &params);
    let oracle = exact_greedy_split(&ds, &all_rows(10), &grads, &params).unwrap();
    assert_eq!(oracle.threshold, 5.5);
    match tree.nodes()[0] {
        Node::Split { feature, threshold, .. } => assert_eq!((feature, threshold), (0, 5.5)),
        _ => panic!("root should split"),
    }
}

#[test]
fn leaf_wise_budget_of_one_and_two() {
    let ds = unlabeled(&(0..8).map(|i| vec![i as f64, (i * 3 % 8) as f64]).collect::<Vec<_>>());
    let grads = unit_hessian(&[-1.0, 0.5, -0.5, 1.0, 1.0, -1.0, 0.5, 0.5]);
    let m = binned(&ds);
    let rows = all_rows(8);
    let one = grow_leaf_wise(&m, &grads, &rows, &TreeParams { max_leaves: 1, ..TreeParams::default() });
    assert_eq!(one.n_leaves(), 1);
    let two = grow_leaf_wise(&m, &grads, &rows, &TreeParams { max_leaves: 2, ..TreeParams::default() });
    let stump = grow_level_wise(&m, &grads, &rows, &TreeParams { max_depth: 1, ..TreeParams::default() });
    assert_eq!(two.nodes(), stump.nodes());
}

#[test]
fn leaf_wise_expands_the_stronger_child() {
    // Root cut at 3.5; the left child's best residual gain (0.3125) beats the
    // right child's (0.1979), so a three-leaf budget goes to the left.
    let ds = unlabeled(&(1..=6).map(|i| vec![i as f64]).collect::<Vec<_>>());
    let grads = unit_hessian(&[-0.5, 0.5, 1.0, -0.5, -0.5, 0.5]);
    let params = TreeParams {
        max_leaves: 3,
        ..TreeParams::default()
    };
    let tree = grow_leaf_wise(&binned(&ds), &grads, &all_rows(6), &params);
    let log = tree.split_log();
    assert_eq!(log.len(), 2);
    assert_eq!(log[0].threshold, 3.5);
    let Node::Split { left, right, .. } = tree.nodes()[0] else {
        panic!("root should split")
    };
    assert_eq!(log[1].node, left);
    assert!(matches!(tree.nodes()[right], Node::Leaf { .. }));
    assert!((log[1].gain - 0.3125).abs() < 1e-12);
    // exhaustive check of the two possible second moves
    let lrows = [0, 1, 2];
    let rrows = [3, 4, 5];
    let p = TreeParams::default();
    let lbest = exact_greedy_split(&ds, &lrows, &grads, &p).unwrap();
    let rbest = exact_greedy_split(&ds, &rrows, &grads, &p).unwrap();
    assert!(lbest.gain > rbest.gain);
    assert!((rbest.gain - 0.19791666666666666).abs() < 1e-12);
}

#[test]
fn oblivious_level_maximizes_summed_gain() {
    let rows = vec![
        vec![1.0, 3.0, 1.0],
        vec![1.0, 2.0, 0.0],
        vec![0.0, 3.0, 1.0],
        vec![0.0, 0.0, 1.0],
        vec![3.0, 3.0, 1.0],
        vec![2.0, 0.0, 0.0],
        vec![2.0, 2.0, 0.0],
        vec![0.0, 3.0, 3.0],
    ];
    let ds = unlabeled(&rows);
    let grads: Vec<GradPair> = [1.0, 1.0, -1.0, 1.0, 0.5, 0.5, -1.0, -0.5]
        .iter()
        .map(|&g| GradPair::new(g, 0.25))
        .collect();
    let params = TreeParams {
        max_depth: 2,
        ..TreeParams::default()
    };
    let tree = grow_oblivious(&binned(&ds), &grads, &all_rows(8), &params);
    let levels = tree.level_splits();
    assert_eq!(levels.len(), 2);
    assert_eq!((levels[0].feature, levels[0].threshold), (0, 0.5));

    let left: Vec<usize> = (0..8).filter(|&i| rows[i][0] < 0.5).collect();
    let right: Vec<usize> = (0..8).filter(|&i| rows[i][0] >= 0.5).collect();
    // exhaustive search over (feature, midpoint)
    let mut best = (usize::MAX, f64::NAN, f64::NEG_INFINITY);
    let mut best_left = best;
    let mut best_right = best;
    for f in 0..3 {
        let mut vals: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals.dedup();
        for w in vals.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let gl = raw_cut_gain(&ds, &left, &grads, f, t, 1.0);
            let gr = raw_cut_gain(&ds, &right, &grads, f, t, 1.0);
            if gl + gr > best.2 {
                best = (f, t, gl + gr);
            }
            if gl > best_left.2 {
                best_left = (f, t, gl);
            }
            if gr > best_right.2 {
                best_right = (f, t, gr);
            }
        }
    }
    assert_eq!((levels[1].feature, levels[1].threshold), (best.0, best.1));
    assert_eq!((best.0, best.1), (1, 2.5));
    assert_ne!((best_left.0, best_left.1), (best.0, best.1));
    assert_ne!((best_right.0, best_right.1), (best.0, best.1));
    assert_ne!(best_left.0, best_right.0);
    assert_eq!(tree.n_leaves(), 4);
}

#[test]
fn oblivious_depth_one_matches_best_root_split() {
    let ds = unlabeled(&(0..8).map(|i| vec![(i % 3) as f64, i as f64]).collect::<Vec<_>>());
    let grads = unit_hessian(&[-1.0, 0.5, -0.5, 1.0, 1.0, -1.0, 0.5, 0.5]);
    let m = binned(&ds);
    let rows = all_rows(8);
    let params = TreeParams {
        max_depth: 1,
        ..TreeParams::default()
    };
    let ob = grow_oblivious(&m, &grads, &rows, &params);
    let lw = grow_level_wise(&m, &grads, &rows, &params);
    assert_eq!(ob.nodes(), lw.nodes());
}

#[test]
fn oblivious_empty_leaves_have_zero_weight() {
    // row 3 sits alone right of the root cut, so one second-level cell stays empty
    let ds = unlabeled(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
    let grads = unit_hessian(&[-1.0, -1.0, 3.0, -3.0]);
    let params = TreeParams {
        max_depth: 2,
        lambda: 0.5,
        ..TreeParams::default()
    };
    let tree = grow_oblivious(&binned(&ds), &grads, &all_rows(4), &params);
    assert_eq!(tree.n_leaves(), 4);
    let weights: Vec<f64> = tree
        .nodes()
        .iter()
        .filter_map(|n| match n {
            Node::Leaf { weight } => Some(*weight),
            _ => None,
        })
        .collect();
    assert!(weights.contains(&0.0), "{weights:?}");
}

fn dyadic_case() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<GradPair>, TreeParams)> {
    (2usize..=64, 1usize..=4).prop_flat_map(|(n, d)| {
        (
            proptest::collection::vec(proptest::collection::vec(0u8..10, d), n),
            proptest::collection::vec((-256i32..=256, 1i32..=256), n),
            (0usize..4, 0usize..2, 1usize..4, 0usize..2),
        )
            .prop_map(|(x, g, (l, gm, msl, mcw))| {
                let rows = x
                    .into_iter()
                    .map(|r| r.into_iter().map(f64::from).collect())
                    .collect();
                let grads = g
                    .into_iter()
                    .map(|(g, h)| GradPair::new(g as f64 / 256.0, h as f64 / 256.0))
                    .collect();
                let params = TreeParams {
                    lambda: [0.0, 0.5, 1.0, 2.0][l],
                    gamma: [0.0, 0.01][gm],
                    min_samples_leaf: msl,
                    min_child_weight: [0.0, 0.1][mcw],
                    ..TreeParams::default()
                };
                (rows, grads, params)
            })
    })
}

proptest! {
    #[test]
    fn histogram_matches_exact_greedy((rows, grads, params) in dyadic_case()) {
        let ds = unlabeled(&rows);
        let idx = all_rows(rows.len());
        let m = binned(&ds);
        let hist = best_split_histogram(&m, &idx, &grads, &params);
        let exact = exact_greedy_split(&ds, &idx, &grads, &params);
        match (hist, exact) {
            (None, None) => {}
            (Some(h), Some(e)) => {
                prop_assert_eq!(h.feature, e.feature);
                prop_assert_eq!(m.bins().thresholds(h.feature)[h.bin], e.threshold);
                prop_assert!((h.gain - e.gain).abs() <= 1e-10);
            }
            (h, e) => prop_assert!(false, "histogram {:?} vs exact {:?}", h, e),
        }
    }

    #[test]
    fn grown_trees_keep_invariants((rows, grads, params) in dyadic_case()) {
        let ds = unlabeled(&rows);
        let idx = all_rows(rows.len());
        let m = binned(&ds);
        let params = TreeParams { max_depth: 3, max_leaves: 5, ..params };

        let level = grow_level_wise(&m, &grads, &idx, &params);
        prop_assert!(level.depth() <= 3);
        prop_assert!(level.split_log().iter().all(|s| s.gain > 0.0));

        let leaf = grow_leaf_wise(&m, &grads, &idx, &params);
        prop_assert!(leaf.n_leaves() <= 5);
        prop_assert!(leaf.depth() <= 3);
        // replay: each logged split is the frontier maximum at its step
        let mut frontier: Vec<(usize, usize, Vec<usize>)> = vec![(0, 0, idx.clone())];
        for rec in leaf.split_log() {
            let mut best = f64::NEG_INFINITY;
            for (_, depth, r) in &frontier {
                if *depth < params.max_depth {
                    if let Some(c) = best_split_histogram(&m, r, &grads, &params) {
                        best = best.max(c.gain);
                    }
                }
            }
            prop_assert!(rec.gain > 0.0);
            prop_assert_eq!(rec.gain, best);
            let pos = frontier.iter().position(|f| f.0 == rec.node).unwrap();
            let (_, depth, r) = frontier.remove(pos);
            let Node::Split { left, right, .. } = leaf.nodes()[rec.node] else { unreachable!() };
            let col = m.column(rec.feature);
            let (l, rr): (Vec<usize>, Vec<usize>) = r.iter().partition(|&&i| (col[i] as usize) <= rec.bin);
            frontier.push((left, depth + 1, l));
            frontier.push((right, depth + 1, rr));
        }

        let ob = grow_oblivious(&m, &grads, &idx, &params);
        prop_assert_eq!(ob.n_leaves(), 1 << ob.level_splits().len());
        // every node at depth d carries the level's split
        let mut level_nodes = vec![0usize];
        for ls in ob.level_splits() {
            let mut next = Vec::new();
            for id in level_nodes {
                match ob.nodes()[id] {
                    Node::Split { feature, threshold, left, right } => {
                        prop_assert_eq!((feature, threshold), (ls.feature, ls.threshold));
                        next.push(left);
                        next.push(right);
                    }
                    Node::Leaf { .. } => prop_assert!(false, "oblivious tree not perfect"),
                }
            }
            level_nodes = next;
        }

        // training rows route identically through raw thresholds and bins
        for t in [&level, &leaf, &ob] {
            for (i, row) in rows.iter().enumerate() {
                let leaf_id = t.leaf_index(row);
                let mut id = 0;
                while let Node::Split { feature, left, right, .. } = t.nodes()[id] {
                    let rec_bin = t.split_log().iter().find(|s| s.node == id).unwrap().bin;
                    id = if (m.get(i, feature) as usize) <= rec_bin { left } else { right };
                }
                prop_assert_eq!(leaf_id, id);
            }
        }
    }

    #[test]
    fn leaf_weight_beats_perturbations(g in -100.0f64..100.0, h in 0.0f64..50.0, lambda in 0.01f64..10.0) {
        let w = featboost::tree::leaf_weight(g, h, lambda).unwrap();
        let obj = |w: f64| g * w + 0.5 * (h + lambda) * w * w;
        for eps in [1e-3, 1e-2] {
            prop_assert!(obj(w) <= obj(w + eps));
            prop_assert!(obj(w) <= obj(w - eps));
        }
    }
}
