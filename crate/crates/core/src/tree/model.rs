use serde::{Deserialize, Serialize};

use super::split::GradSum;
use super::TreeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    LevelWise,
    LeafWise,
    Oblivious,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::LevelWise, Flavor::LeafWise, Flavor::Oblivious];

    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::LevelWise => "level_wise",
            Flavor::LeafWise => "leaf_wise",
            Flavor::Oblivious => "oblivious",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// `value < threshold` goes left, everything else (equality included) right.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSplit {
    pub feature: usize,
    pub threshold: f64,
}

/// One accepted split, in the order growth made it.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord {
    pub node: usize,
    pub depth: usize,
    pub feature: usize,
    pub bin: usize,
    pub threshold: f64,
    pub gain: f64,
    pub left: GradSum,
    pub right: GradSum,
}

/// Node arena rooted at index 0. Oblivious trees also carry the shared
/// `(feature, threshold)` of every level.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    flavor: Flavor,
    n_features: usize,
    nodes: Vec<Node>,
    level_splits: Vec<LevelSplit>,
    split_log: Vec<SplitRecord>,
}

impl Tree {
    pub(crate) fn from_grown(
        flavor: Flavor,
        n_features: usize,
        nodes: Vec<Node>,
        level_splits: Vec<LevelSplit>,
        split_log: Vec<SplitRecord>,
    ) -> Self {
        Tree {
            flavor,
            n_features,
            nodes,
            level_splits,
            split_log,
        }
    }

    /// Builds a tree from externally supplied parts, checking that the arena
    /// is a proper binary tree rooted at 0 and, for oblivious trees, that every
    /// level matches `level_splits`.
    pub fn from_parts(
        flavor: Flavor,
        n_features: usize,
        nodes: Vec<Node>,
        level_splits: Vec<LevelSplit>,
    ) -> Result<Self, TreeError> {
        let bad = |m: String| Err(TreeError::Malformed(m));
        if nodes.is_empty() {
            return bad("tree has no nodes".into());
        }
        let mut parent_seen = vec![false; nodes.len()];
        for (id, node) in nodes.iter().enumerate() {
            match *node {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    if feature >= n_features {
                        return bad(format!("node {id} uses feature {feature} of {n_features}"));
                    }
                    if !threshold.is_finite() {
                        return bad(format!("node {id} has a non-finite threshold"));
                    }
                    for child in [left, right] {
                        if child == 0 || child >= nodes.len() {
                            return bad(format!("node {id} points at invalid child {child}"));
                        }
                        if std::mem::replace(&mut parent_seen[child], true) {
                            return bad(format!("node {child} has more than one parent"));
                        }
                    }
                }
                Node::Leaf { weight } => {
                    if !weight.is_finite() {
                        return bad(format!("leaf {id} has a non-finite weight"));
                    }
                }
            }
        }
        // n-1 distinct child slots plus reachability from the root rules out cycles
        let mut visited = 0;
        let mut stack = vec![0];
        while let Some(id) = stack.pop() {
            visited += 1;
            if visited > nodes.len() {
                return bad("cycle detected".into());
            }
            if let Node::Split { left, right, .. } = nodes[id] {
                stack.push(left);
                stack.push(right);
            }
        }
        if visited != nodes.len() {
            return bad(format!(
                "{} of {} nodes unreachable from the root",
                nodes.len() - visited,
                nodes.len()
            ));
        }
        let tree = Tree {
            flavor,
            n_features,
            nodes,
            level_splits,
            split_log: Vec::new(),
        };
        if flavor == Flavor::Oblivious {
            tree.check_oblivious()?;
        } else if !tree.level_splits.is_empty() {
            return bad("level_splits are only valid for oblivious trees".into());
        }
        Ok(tree)
    }

    fn check_oblivious(&self) -> Result<(), TreeError> {
        let mut level = vec![0usize];
        for (d, ls) in self.level_splits.iter().enumerate() {
            let mut next = Vec::with_capacity(level.len() * 2);
            for &id in &level {
                match self.nodes[id] {
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } if feature == ls.feature && threshold.to_bits() == ls.threshold.to_bits() => {
                        next.push(left);
                        next.push(right);
                    }
                    _ => {
                        return Err(TreeError::Malformed(format!(
                            "node {id} at depth {d} does not match the level split"
                        )))
                    }
                }
            }
            level = next;
        }
        if level
            .iter()
            .any(|&id| matches!(self.nodes[id], Node::Split { .. }))
        {
            return Err(TreeError::Malformed(
                "oblivious tree is deeper than its level_splits".into(),
            ));
        }
        Ok(())
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn level_splits(&self) -> &[LevelSplit] {
        &self.level_splits
    }

    /// Splits in the order they were made. Empty for trees loaded from disk.
    pub fn split_log(&self) -> &[SplitRecord] {
        &self.split_log
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((id, d)) = stack.pop() {
            best = best.max(d);
            if let Node::Split { left, right, .. } = self.nodes[id] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        best
    }

    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut id = 0;
        while let Node::Split {
            feature,
            threshold,
            left,
            right,
        } = self.nodes[id]
        {
            id = if row[feature] < threshold { left } else { right };
        }
        id
    }

    /// Leaf weight for `row`. The caller guarantees `row.len() == n_features`.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { weight } => weight,
            Node::Split { .. } => unreachable!("leaf_index stops at a leaf"),
        }
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64, TreeError> {
        if row.len() != self.n_features {
            return Err(TreeError::DimensionMismatch {
                expected: self.n_features,
                found: row.len(),
            });
        }
        Ok(self.predict_row(row))
    }
}
