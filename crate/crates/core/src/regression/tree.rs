//! CART regression tree: greedy binary splitting on within-node squared
//! error, leaves predicting the node mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 6,
            min_samples_split: 10,
        }
    }
}

/// Flat node storage; index 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    nodes: Vec<TreeNode>,
}

impl TreeModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { value } => return value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    /// Assembles a model from flat node storage (index 0 is the root).
    /// Mainly for reference implementations in tests.
    pub fn from_nodes(nodes: Vec<TreeNode>) -> TreeModel {
        assert!(!nodes.is_empty(), "tree needs at least a root");
        TreeModel { nodes }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }
}

pub(crate) fn validate_matrix(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::invalid("empty dataset"));
    }
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "feature matrix has {} rows for {} targets",
            x.len(),
            y.len()
        )));
    }
    let m = x[0].len();
    if m == 0 {
        return Err(Error::invalid("feature matrix has no columns"));
    }
    for (r, row) in x.iter().enumerate() {
        if row.len() != m {
            return Err(Error::invalid(format!(
                "ragged feature matrix: row {r} has {} columns, expected {m}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite feature in row {r}")));
        }
    }
    if let Some(r) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite target in row {r}")));
    }
    Ok(m)
}

/// Fits a regression tree. Split search is exhaustive over every feature
/// and every midpoint between adjacent distinct values; the split with the
/// strictly largest squared-error reduction wins, with ties resolved
/// toward the lowest feature index, then the lowest threshold (the scan
/// order guarantees this). Deterministic by construction.
pub fn fit_decision_tree(x: &[Vec<f64>], y: &[f64], config: &TreeConfig) -> Result<TreeModel> {
    let m = validate_matrix(x, y)?;
    if config.max_depth == 0 || config.min_samples_split == 0 {
        return Err(Error::invalid(
            "max_depth and min_samples_split must be positive",
        ));
    }
    let mut nodes = Vec::new();
    let mut indices: Vec<usize> = (0..x.len()).collect();
    build(x, y, m, config, &mut indices, 0, &mut nodes);
    Ok(TreeModel { nodes })
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn node_mean(y: &[f64], indices: &[usize]) -> f64 {
    indices.iter().map(|&i| y[i]).sum::<f64>() / indices.len() as f64
}

/// Builds the subtree over `indices`, appending to `nodes`, and returns the
/// new subtree root index.
fn build(
    x: &[Vec<f64>],
    y: &[f64],
    m: usize,
    config: &TreeConfig,
    indices: &mut [usize],
    depth: usize,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let n = indices.len();
    let make_leaf = |nodes: &mut Vec<TreeNode>| {
        nodes.push(TreeNode::Leaf {
            value: node_mean(y, indices),
        });
        nodes.len() - 1
    };

    if depth >= config.max_depth || n < config.min_samples_split {
        return make_leaf(nodes);
    }
    let first = y[indices[0]];
    if indices.iter().all(|&i| y[i] == first) {
        return make_leaf(nodes);
    }

    let Some(best) = find_best_split(x, y, m, indices) else {
        return make_leaf(nodes);
    };

    // partition in place: left gets rows with value <= threshold
    indices.sort_by(|&a, &b| x[a][best.feature].total_cmp(&x[b][best.feature]));
    let split_at = indices.partition_point(|&i| x[i][best.feature] <= best.threshold);
    debug_assert!(split_at > 0 && split_at < n);

    let slot = nodes.len();
    nodes.push(TreeNode::Leaf { value: 0.0 }); // placeholder until children exist
    let (left_idx, right_idx) = indices.split_at_mut(split_at);
    let left = build(x, y, m, config, left_idx, depth + 1, nodes);
    let right = build(x, y, m, config, right_idx, depth + 1, nodes);
    nodes[slot] = TreeNode::Split {
        feature: best.feature,
        threshold: best.threshold,
        left,
        right,
    };
    slot
}

fn find_best_split(x: &[Vec<f64>], y: &[f64], m: usize, indices: &[usize]) -> Option<BestSplit> {
    let n = indices.len();
    let total: f64 = indices.iter().map(|&i| y[i]).sum();
    let total_sq: f64 = indices.iter().map(|&i| y[i] * y[i]).sum();
    let parent_sse = total_sq - total * total / n as f64;

    let mut best: Option<BestSplit> = None;
    let mut order: Vec<usize> = indices.to_vec();
    // right-side sums accumulate independently (suffix arrays) instead of
    // subtracting from the node totals: mathematically tied candidates then
    // produce bit-identical gains, so the (lowest feature, lowest
    // threshold) tie-break actually holds
    let mut suffix_sum = vec![0.0; n + 1];
    let mut suffix_sq = vec![0.0; n + 1];
    for feature in 0..m {
        order.sort_by(|&a, &b| x[a][feature].total_cmp(&x[b][feature]));
        for k in (0..n).rev() {
            let v = y[order[k]];
            suffix_sum[k] = suffix_sum[k + 1] + v;
            suffix_sq[k] = suffix_sq[k + 1] + v * v;
        }
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for k in 1..n {
            let prev = order[k - 1];
            left_sum += y[prev];
            left_sq += y[prev] * y[prev];
            let (v_prev, v_next) = (x[prev][feature], x[order[k]][feature]);
            if v_prev >= v_next {
                continue; // only between distinct adjacent values
            }
            let k_f = k as f64;
            let r_f = (n - k) as f64;
            let sse = (left_sq - left_sum * left_sum / k_f)
                + (suffix_sq[k] - suffix_sum[k] * suffix_sum[k] / r_f);
            let gain = parent_sse - sse;
            if gain > best.as_ref().map_or(0.0, |b| b.gain) {
                best = Some(BestSplit {
                    gain,
                    feature,
                    threshold: (v_prev + v_next) / 2.0,
                });
            }
        }
    }
    best
}
