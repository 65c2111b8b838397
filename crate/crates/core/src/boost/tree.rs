//! Regression trees grown on per-sample gradient statistics.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::FeatureMatrix;

/// How candidate splits are scored and leaves valued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitCriterion {
    /// Variance reduction on the pseudo-residuals `-g`; Newton leaf values `-G / H`.
    Variance,
    /// Regularized second-order gain with L2 penalty `lambda` and split cost `gamma`;
    /// leaf values `-G / (H + lambda)`.
    Regularized { lambda: f64, gamma: f64 },
}

impl SplitCriterion {
    /// Gain of splitting a node with sums `(g, h, n)` into left and right parts.
    pub fn gain(self, left: NodeSums, right: NodeSums) -> f64 {
        let parent = left.plus(right);
        match self {
            SplitCriterion::Variance => {
                // Residuals are -g, so sums of residuals are -G and squares are equal.
                left.g * left.g / left.n as f64 + right.g * right.g / right.n as f64
                    - parent.g * parent.g / parent.n as f64
            }
            SplitCriterion::Regularized { lambda, gamma } => {
                let score = |s: NodeSums| s.g * s.g / (s.h + lambda);
                0.5 * (score(left) + score(right) - score(parent)) - gamma
            }
        }
    }

    pub fn leaf_weight(self, sums: NodeSums) -> f64 {
        match self {
            SplitCriterion::Variance => {
                if sums.h <= f64::EPSILON {
                    0.0
                } else {
                    -sums.g / sums.h
                }
            }
            SplitCriterion::Regularized { lambda, .. } => {
                let denom = sums.h + lambda;
                if denom <= f64::EPSILON {
                    0.0
                } else {
                    -sums.g / denom
                }
            }
        }
    }
}

/// Gradient sum, hessian sum and sample count of a node.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NodeSums {
    pub g: f64,
    pub h: f64,
    pub n: usize,
}

impl NodeSums {
    pub fn of(rows: &[usize], grad: &[f64], hess: &[f64]) -> NodeSums {
        rows.iter().fold(NodeSums::default(), |acc, &i| NodeSums {
            g: acc.g + grad[i],
            h: acc.h + hess[i],
            n: acc.n + 1,
        })
    }

    fn plus(self, o: NodeSums) -> NodeSums {
        NodeSums {
            g: self.g + o.g,
            h: self.h + o.h,
            n: self.n + o.n,
        }
    }

    fn minus(self, o: NodeSums) -> NodeSums {
        NodeSums {
            g: self.g - o.g,
            h: self.h - o.h,
            n: self.n - o.n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    /// Samples with `x[feature] <= threshold` go left.
    pub threshold: f64,
    pub gain: f64,
}

/// Best split over all features and all midpoints between consecutive
/// distinct values, or `None` when no split has positive gain.
///
/// Equal gains keep the lower feature index, then the lower threshold.
pub fn find_best_split(
    x: &FeatureMatrix,
    rows: &[usize],
    grad: &[f64],
    hess: &[f64],
    criterion: SplitCriterion,
    min_samples_leaf: usize,
) -> Option<Split> {
    let min_leaf = min_samples_leaf.max(1);
    if rows.len() < 2 * min_leaf {
        return None;
    }
    let total = NodeSums::of(rows, grad, hess);
    let mut best: Option<Split> = None;
    let mut sorted = rows.to_vec();
    for feature in 0..x.n_cols() {
        sorted.sort_by(|&a, &b| x.get(a, feature).total_cmp(&x.get(b, feature)).then(a.cmp(&b)));
        let mut left = NodeSums::default();
        for k in 1..sorted.len() {
            let prev = sorted[k - 1];
            left = left.plus(NodeSums {
                g: grad[prev],
                h: hess[prev],
                n: 1,
            });
            let (lo, hi) = (x.get(prev, feature), x.get(sorted[k], feature));
            if lo == hi || k < min_leaf || sorted.len() - k < min_leaf {
                continue;
            }
            let gain = criterion.gain(left, total.minus(left));
            if gain > 0.0 && best.is_none_or(|b| gain > b.gain) {
                best = Some(Split {
                    feature,
                    threshold: lo + (hi - lo) / 2.0,
                    gain,
                });
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
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

/// Binary tree as a flat node array, root first, children linked by index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone, Copy)]
pub struct GrowParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub criterion: SplitCriterion,
}

impl RegressionTree {
    pub fn grow(x: &FeatureMatrix, grad: &[f64], hess: &[f64], params: GrowParams) -> RegressionTree {
        let rows: Vec<usize> = (0..x.n_rows()).collect();
        let mut tree = RegressionTree { nodes: Vec::new() };
        tree.grow_node(x, &rows, grad, hess, params, 0);
        tree
    }

    fn grow_node(
        &mut self,
        x: &FeatureMatrix,
        rows: &[usize],
        grad: &[f64],
        hess: &[f64],
        params: GrowParams,
        depth: usize,
    ) -> usize {
        let id = self.nodes.len();
        let split = if depth < params.max_depth {
            find_best_split(x, rows, grad, hess, params.criterion, params.min_samples_leaf)
        } else {
            None
        };
        let Some(split) = split else {
            let weight = params.criterion.leaf_weight(NodeSums::of(rows, grad, hess));
            self.nodes.push(TreeNode::Leaf { weight });
            return id;
        };
        self.nodes.push(TreeNode::Leaf { weight: 0.0 });
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x.get(i, split.feature) <= split.threshold);
        let left = self.grow_node(x, &l, grad, hess, params, depth + 1);
        let right = self.grow_node(x, &r, grad, hess, params, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf { weight } => return weight,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn scale_leaves(&mut self, factor: f64) {
        for n in &mut self.nodes {
            if let TreeNode::Leaf { weight } = n {
                *weight *= factor;
            }
        }
    }

    /// Structural check for trees read from outside: every child index is in
    /// range and points forward, every node reachable exactly once.
    pub fn is_well_formed(&self, n_features: usize) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut seen = alloc::vec![false; self.nodes.len()];
        seen[0] = true;
        for (i, n) in self.nodes.iter().enumerate() {
            if let TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } = *n
            {
                if feature >= n_features || !threshold.is_finite() {
                    return false;
                }
                for c in [left, right] {
                    if c <= i || c >= self.nodes.len() || seen[c] {
                        return false;
                    }
                    seen[c] = true;
                }
            } else if let TreeNode::Leaf { weight } = *n {
                if !weight.is_finite() {
                    return false;
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}
