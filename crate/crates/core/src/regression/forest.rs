//! Random forest: bootstrap-resampled CART trees with averaged predictions.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::regression::tree::{fit_decision_tree, validate_matrix, TreeConfig, TreeModel};
use crate::rng::{derive_seed, DeterministicRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_estimators: 100,
            max_depth: 8,
            min_samples_split: 2,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    trees: Vec<TreeModel>,
}

impl ForestModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees
            .iter()
            .map(|t| t.predict_row(row))
            .sum::<f64>()
            / self.trees.len() as f64
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    /// One prediction per tree, in training order.
    pub fn predict_per_tree(&self, row: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict_row(row)).collect()
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

/// Trains `n_estimators` trees on seeded bootstrap resamples (or on the
/// full data when `bootstrap` is off). Tree seeds derive from the master
/// seed by tree index, so any evaluation order yields identical forests.
pub fn fit_random_forest(
    x: &[Vec<f64>],
    y: &[f64],
    config: &ForestConfig,
    seed: u64,
) -> Result<ForestModel> {
    validate_matrix(x, y)?;
    if config.n_estimators == 0 {
        return Err(crate::error::Error::invalid(
            "n_estimators must be at least 1",
        ));
    }
    let tree_config = TreeConfig {
        max_depth: config.max_depth,
        min_samples_split: config.min_samples_split,
    };
    let n = x.len();
    let mut trees = Vec::with_capacity(config.n_estimators);
    for tree_index in 0..config.n_estimators {
        let tree = if config.bootstrap {
            let mut rng = DeterministicRng::seeded(derive_seed(seed, tree_index as u64));
            let mut bx = Vec::with_capacity(n);
            let mut by = Vec::with_capacity(n);
            for _ in 0..n {
                let i = rng.index(n);
                bx.push(x[i].clone());
                by.push(y[i]);
            }
            fit_decision_tree(&bx, &by, &tree_config)?
        } else {
            fit_decision_tree(x, y, &tree_config)?
        };
        trees.push(tree);
    }
    Ok(ForestModel { trees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;
    use approx::assert_abs_diff_eq;

    fn random_data(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = DeterministicRng::seeded(seed);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.next_f64() * 5.0).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * r[1] - r[2]).collect();
        (x, y)
    }

    #[test]
    fn single_tree_without_bootstrap_is_plain_cart() {
        let (x, y) = random_data(60, 1);
        let config = ForestConfig {
            n_estimators: 1,
            max_depth: 4,
            min_samples_split: 2,
            bootstrap: false,
        };
        let forest = fit_random_forest(&x, &y, &config, 42).unwrap();
        let tree = fit_decision_tree(
            &x,
            &y,
            &TreeConfig {
                max_depth: 4,
                min_samples_split: 2,
            },
        )
        .unwrap();
        for row in &x {
            assert_eq!(forest.predict_row(row), tree.predict_row(row));
        }
    }

    #[test]
    fn constant_target_predicts_constant() {
        let (x, _) = random_data(40, 2);
        let y = vec![3.25; 40];
        let forest = fit_random_forest(&x, &y, &ForestConfig::default(), 7).unwrap();
        for row in &x {
            assert_eq!(forest.predict_row(row), 3.25);
        }
    }

    #[test]
    fn prediction_is_mean_of_tree_predictions() {
        let (x, y) = random_data(80, 3);
        let config = ForestConfig {
            n_estimators: 10,
            max_depth: 5,
            min_samples_split: 2,
            bootstrap: true,
        };
        let forest = fit_random_forest(&x, &y, &config, 11).unwrap();
        for row in x.iter().take(10) {
            let per_tree = forest.predict_per_tree(row);
            assert_eq!(per_tree.len(), 10);
            let mean = per_tree.iter().sum::<f64>() / 10.0;
            assert_abs_diff_eq!(forest.predict_row(row), mean, epsilon = 1e-12);
        }
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = random_data(50, 4);
        let config = ForestConfig {
            n_estimators: 5,
            ..ForestConfig::default()
        };
        let a = fit_random_forest(&x, &y, &config, 99).unwrap();
        let b = fit_random_forest(&x, &y, &config, 99).unwrap();
        assert_eq!(a, b);
        let c = fit_random_forest(&x, &y, &config, 100).unwrap();
        assert_ne!(a, c);
    }
}
