//! Stagewise gradient boosting with squared loss: each stage fits a
//! depth-limited tree to the current residuals and adds a damped copy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::metrics::mse;
use crate::regression::tree::{fit_decision_tree, validate_matrix, TreeConfig, TreeModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoostingConfig {
    pub learning_rate: f64,
    pub n_estimators: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for BoostingConfig {
    fn default() -> Self {
        BoostingConfig {
            learning_rate: 0.1,
            n_estimators: 100,
            max_depth: 3,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostingModel {
    /// F0: the training-target mean.
    pub baseline: f64,
    pub learning_rate: f64,
    trees: Vec<TreeModel>,
    /// Training MSE after each stage; non-increasing for squared loss.
    pub stage_train_mse: Vec<f64>,
}

impl BoostingModel {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.baseline
            + self.learning_rate
                * self
                    .trees
                    .iter()
                    .map(|t| t.predict_row(row))
                    .sum::<f64>()
    }

    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn n_stages(&self) -> usize {
        self.trees.len()
    }
}

pub fn fit_gradient_boosting(
    x: &[Vec<f64>],
    y: &[f64],
    config: &BoostingConfig,
) -> Result<BoostingModel> {
    validate_matrix(x, y)?;
    if !(config.learning_rate > 0.0 && config.learning_rate <= 1.0) {
        return Err(Error::invalid(format!(
            "learning rate {} outside (0, 1]",
            config.learning_rate
        )));
    }
    if config.n_estimators == 0 {
        return Err(Error::invalid("n_estimators must be at least 1"));
    }

    let tree_config = TreeConfig {
        max_depth: config.max_depth,
        min_samples_split: config.min_samples_split,
    };
    let baseline = y.iter().sum::<f64>() / y.len() as f64;
    let mut current: Vec<f64> = vec![baseline; y.len()];
    let mut trees = Vec::with_capacity(config.n_estimators);
    let mut stage_train_mse = Vec::with_capacity(config.n_estimators);

    for _ in 0..config.n_estimators {
        let residuals: Vec<f64> = y.iter().zip(&current).map(|(t, f)| t - f).collect();
        let tree = fit_decision_tree(x, &residuals, &tree_config)?;
        for (f, row) in current.iter_mut().zip(x) {
            *f += config.learning_rate * tree.predict_row(row);
        }
        stage_train_mse.push(mse(y, &current)?);
        trees.push(tree);
    }

    Ok(BoostingModel {
        baseline,
        learning_rate: config.learning_rate,
        trees,
        stage_train_mse,
    })
}
