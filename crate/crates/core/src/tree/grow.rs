//! Level-wise, leaf-wise and oblivious tree growth.
//!
//! All three take the row subset to fit (ascending indices into `binned`) and
//! full-length gradient pairs indexed by row. A row goes left at threshold
//! index `k` when its bin is `<= k`; the stored raw threshold is the bin's
//! upper cut point.

use rayon::prelude::*;

use super::model::{Flavor, LevelSplit, Node, SplitRecord, Tree};
use super::split::{
    best_split_with_parent, build_histogram, prefix_sums, raw_gain, GradPair, GradSum,
    SplitCandidate, TreeParams,
};
use crate::data::BinnedMatrix;

pub fn grow_tree(
    flavor: Flavor,
    binned: &BinnedMatrix,
    grads: &[GradPair],
    rows: &[usize],
    params: &TreeParams,
) -> Tree {
    match flavor {
        Flavor::LevelWise => grow_level_wise(binned, grads, rows, params),
        Flavor::LeafWise => grow_leaf_wise(binned, grads, rows, params),
        Flavor::Oblivious => grow_oblivious(binned, grads, rows, params),
    }
}

fn weight_of(sum: GradSum, lambda: f64) -> f64 {
    let denom = sum.h + lambda;
    if denom > 0.0 {
        -sum.g / denom
    } else {
        0.0
    }
}

fn partition(binned: &BinnedMatrix, rows: &[usize], feature: usize, bin: usize) -> (Vec<usize>, Vec<usize>) {
    let column = binned.column(feature);
    rows.iter().partition(|&&i| column[i] as usize <= bin)
}

struct Arena {
    nodes: Vec<Node>,
    log: Vec<SplitRecord>,
}

impl Arena {
    fn new() -> Self {
        Arena {
            nodes: vec![Node::Leaf { weight: 0.0 }],
            log: Vec::new(),
        }
    }

    /// Turns leaf `id` into a split and returns the new child ids.
    fn split(
        &mut self,
        binned: &BinnedMatrix,
        id: usize,
        depth: usize,
        c: &SplitCandidate,
    ) -> (usize, usize) {
        let left = self.nodes.len();
        let right = left + 1;
        let threshold = binned.bins().thresholds(c.feature)[c.bin];
        self.nodes.push(Node::Leaf { weight: 0.0 });
        self.nodes.push(Node::Leaf { weight: 0.0 });
        self.nodes[id] = Node::Split {
            feature: c.feature,
            threshold,
            left,
            right,
        };
        self.log.push(SplitRecord {
            node: id,
            depth,
            feature: c.feature,
            bin: c.bin,
            threshold,
            gain: c.gain,
            left: c.left,
            right: c.right,
        });
        (left, right)
    }

    fn set_leaf(&mut self, id: usize, sum: GradSum, lambda: f64) {
        self.nodes[id] = Node::Leaf {
            weight: weight_of(sum, lambda),
        };
    }

    fn finish(self, flavor: Flavor, binned: &BinnedMatrix, level_splits: Vec<LevelSplit>) -> Tree {
        Tree::from_grown(flavor, binned.n_features(), self.nodes, level_splits, self.log)
    }
}

struct Pending {
    id: usize,
    depth: usize,
    rows: Vec<usize>,
    sum: GradSum,
}

/// Breadth-first: every node above `max_depth` with a positive-gain split is split.
pub fn grow_level_wise(
    binned: &BinnedMatrix,
    grads: &[GradPair],
    rows: &[usize],
    params: &TreeParams,
) -> Tree {
    let mut arena = Arena::new();
    let mut frontier = vec![Pending {
        id: 0,
        depth: 0,
        rows: rows.to_vec(),
        sum: GradSum::over(rows, grads),
    }];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for node in frontier {
            let candidate = if node.depth < params.max_depth {
                best_split_with_parent(binned, &node.rows, grads, node.sum, params)
            } else {
                None
            };
            match candidate {
                Some(c) => {
                    let (l, r) = arena.split(binned, node.id, node.depth, &c);
                    let (lrows, rrows) = partition(binned, &node.rows, c.feature, c.bin);
                    next.push(Pending {
                        id: l,
                        depth: node.depth + 1,
                        rows: lrows,
                        sum: c.left,
                    });
                    next.push(Pending {
                        id: r,
                        depth: node.depth + 1,
                        rows: rrows,
                        sum: c.right,
                    });
                }
                None => arena.set_leaf(node.id, node.sum, params.lambda),
            }
        }
        frontier = next;
    }
    arena.finish(Flavor::LevelWise, binned, Vec::new())
}

/// Best-first: repeatedly splits the frontier leaf with the largest gain until
/// `max_leaves` leaves exist or no positive gain remains. Leaves at
/// `max_depth` are not expanded. Gain ties go to the lower node id.
pub fn grow_leaf_wise(
    binned: &BinnedMatrix,
    grads: &[GradPair],
    rows: &[usize],
    params: &TreeParams,
) -> Tree {
    let mut arena = Arena::new();
    let candidate_for = |p: &Pending| {
        if p.depth < params.max_depth {
            best_split_with_parent(binned, &p.rows, grads, p.sum, params)
        } else {
            None
        }
    };
    let root = Pending {
        id: 0,
        depth: 0,
        rows: rows.to_vec(),
        sum: GradSum::over(rows, grads),
    };
    let root_candidate = candidate_for(&root);
    let mut frontier: Vec<(Pending, Option<SplitCandidate>)> = vec![(root, root_candidate)];
    let mut n_leaves = 1;
    while n_leaves < params.max_leaves {
        let pick = frontier
            .iter()
            .enumerate()
            .filter_map(|(i, (p, c))| c.as_ref().map(|c| (i, p.id, c.gain)))
            .fold(None, |best: Option<(usize, usize, f64)>, cur| match best {
                Some(b) if b.2 > cur.2 || (b.2 == cur.2 && b.1 < cur.1) => Some(b),
                _ => Some(cur),
            });
        let Some((i, _, _)) = pick else { break };
        let (node, c) = frontier.swap_remove(i);
        let c = c.expect("picked entries carry a candidate");
        let (l, r) = arena.split(binned, node.id, node.depth, &c);
        let (lrows, rrows) = partition(binned, &node.rows, c.feature, c.bin);
        for (id, rows, sum) in [(l, lrows, c.left), (r, rrows, c.right)] {
            let child = Pending {
                id,
                depth: node.depth + 1,
                rows,
                sum,
            };
            let cand = candidate_for(&child);
            frontier.push((child, cand));
        }
        n_leaves += 1;
    }
    for (node, _) in frontier {
        arena.set_leaf(node.id, node.sum, params.lambda);
    }
    arena.finish(Flavor::LeafWise, binned, Vec::new())
}

/// Symmetric growth: each level applies one `(feature, threshold)` to every
/// node, chosen to maximize the summed gain of the level. Nodes without rows
/// contribute nothing; `gamma` is charged once per non-empty node. Per-node
/// child constraints are not applied because every node must take the level
/// split. The result is a perfect tree; empty leaves get weight 0.
pub fn grow_oblivious(
    binned: &BinnedMatrix,
    grads: &[GradPair],
    rows: &[usize],
    params: &TreeParams,
) -> Tree {
    let mut arena = Arena::new();
    let mut level = vec![Pending {
        id: 0,
        depth: 0,
        rows: rows.to_vec(),
        sum: GradSum::over(rows, grads),
    }];
    let mut level_splits = Vec::new();
    let bins = binned.bins();
    for depth in 0..params.max_depth {
        let active: Vec<&Pending> = level.iter().filter(|p| !p.rows.is_empty()).collect();
        let penalty = params.gamma * active.len() as f64;
        let per_feature: Vec<Option<(usize, usize, f64)>> = (0..binned.n_features())
            .into_par_iter()
            .map(|j| {
                let n_bins = bins.n_bins(j);
                if n_bins < 2 {
                    return None;
                }
                let mut totals = vec![0.0f64; n_bins - 1];
                for p in &active {
                    let hist = build_histogram(binned.column(j), n_bins, &p.rows, grads);
                    for (k, left, _) in prefix_sums(&hist) {
                        totals[k] += raw_gain(left, p.sum - left, p.sum, params.lambda);
                    }
                }
                totals
                    .iter()
                    .enumerate()
                    .fold(None, |best: Option<(usize, usize, f64)>, (k, &t)| {
                        let gain = t - penalty;
                        match best {
                            Some(b) if b.2 >= gain => Some(b),
                            _ => Some((j, k, gain)),
                        }
                    })
            })
            .collect();
        let best = per_feature
            .into_iter()
            .flatten()
            .fold(None, |best: Option<(usize, usize, f64)>, c| match best {
                Some(b) if b.2 >= c.2 => Some(b),
                _ => Some(c),
            });
        let Some((feature, bin, gain)) = best.filter(|b| b.2 > 0.0) else {
            break;
        };
        let threshold = bins.thresholds(feature)[bin];
        level_splits.push(LevelSplit { feature, threshold });
        let mut next = Vec::with_capacity(level.len() * 2);
        for node in level {
            let (lrows, rrows) = partition(binned, &node.rows, feature, bin);
            let lsum = GradSum::over(&lrows, grads);
            let rsum = GradSum::over(&rrows, grads);
            let c = SplitCandidate {
                feature,
                bin,
                gain,
                left: lsum,
                right: rsum,
                left_count: lrows.len(),
                right_count: rrows.len(),
            };
            let (l, r) = arena.split(binned, node.id, depth, &c);
            next.push(Pending {
                id: l,
                depth: depth + 1,
                rows: lrows,
                sum: lsum,
            });
            next.push(Pending {
                id: r,
                depth: depth + 1,
                rows: rrows,
                sum: rsum,
            });
        }
        level = next;
    }
    for node in level {
        if node.rows.is_empty() {
            arena.nodes[node.id] = Node::Leaf { weight: 0.0 };
        } else {
            arena.set_leaf(node.id, node.sum, params.lambda);
        }
    }
    arena.finish(Flavor::Oblivious, binned, level_splits)
}
