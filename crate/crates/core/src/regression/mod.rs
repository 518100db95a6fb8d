//! Five regression models over the corrected DNI dataset, with a shared
//! seeded 80/20 split and R^2 / MSE scoring.
//!
//! All models are implemented in this crate: closed-form polynomial ridge,
//! CART, a bootstrap forest, squared-loss gradient boosting, and a small
//! Adam-trained MLP. The benchmark trains every model on identical train
//! rows, scores on identical test rows, and emits per-model reports plus
//! measured-vs-predicted scatter data.

pub mod boosting;
pub mod forest;
pub mod metrics;
pub mod mlp;
pub mod ridge;
pub mod tree;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dni::DniEstimate;
use crate::error::{Error, Result};
use crate::ingest::HourlySample;
use crate::rng::{derive_seed, DeterministicRng};

pub use boosting::{fit_gradient_boosting, BoostingConfig, BoostingModel};
pub use forest::{fit_random_forest, ForestConfig, ForestModel};
pub use metrics::{mse, r2_score};
pub use mlp::{fit_mlp, Activation, MlpConfig, MlpModel, Network};
pub use ridge::{fit_ridge, polynomial_features, PolyRidgeConfig, RidgeModel};
pub use tree::{fit_decision_tree, TreeConfig, TreeModel, TreeNode};

/// Feature column order of [`Dataset`].
pub const FEATURE_NAMES: [&str; 4] = ["cloud_total", "visibility_km", "ghi_w_m2", "cos_zenith"];

/// Daylight feature matrix and DNI target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// One row per daylight sample, columns per [`FEATURE_NAMES`]:
    /// cloud amount in tenths, visibility in km, GHI in W/m2, cos(zenith).
    pub features: Vec<Vec<f64>>,
    /// Final corrected DNI, W/m2.
    pub target: Vec<f64>,
}

impl Dataset {
    /// Builds the regression dataset from an estimated series, keeping
    /// only rows with measured irradiance and the sun above the horizon.
    pub fn from_series(series: &[(HourlySample, DniEstimate)]) -> Dataset {
        let mut features = Vec::new();
        let mut target = Vec::new();
        for (sample, estimate) in series {
            if sample.ghi_missing || sample.cos_zenith <= 0.0 {
                continue;
            }
            features.push(vec![
                sample.cloud_factor * 10.0,
                sample.visibility_km,
                sample.ghi,
                sample.cos_zenith,
            ]);
            target.push(estimate.dni_final);
        }
        Dataset { features, target }
    }

    pub fn n(&self) -> usize {
        self.features.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.len() != self.target.len() {
            return Err(Error::invalid(format!(
                "feature matrix has {} rows for {} targets",
                self.features.len(),
                self.target.len()
            )));
        }
        if self.n() < 2 {
            return Err(Error::invalid(format!(
                "dataset needs at least 2 rows, got {}",
                self.n()
            )));
        }
        Ok(())
    }

    fn take(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            target: indices.iter().map(|&i| self.target[i]).collect(),
        }
    }
}

/// Train/test split protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    /// Keep time order instead of shuffling.
    pub chronological: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 42,
            chronological: false,
        }
    }
}

/// Seeded uniform shuffle split: the first `floor(fraction * n)` shuffled
/// rows train, the rest test. Chronological mode skips the shuffle.
pub fn train_test_split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    dataset.validate()?;
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction {} outside (0, 1)",
            spec.train_fraction
        )));
    }
    let n = dataset.n();
    let mut indices: Vec<usize> = (0..n).collect();
    if !spec.chronological {
        DeterministicRng::seeded(spec.seed).shuffle(&mut indices);
    }
    let n_train = (spec.train_fraction * n as f64).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::invalid(format!(
            "split leaves an empty side: {n_train} train of {n}"
        )));
    }
    let (train_idx, test_idx) = indices.split_at(n_train);
    Ok((dataset.take(train_idx), dataset.take(test_idx)))
}

/// Hyperparameters for every benchmark model, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkConfig {
    pub poly_ridge: PolyRidgeConfig,
    pub decision_tree: TreeConfig,
    pub random_forest: ForestConfig,
    pub gradient_boosting: BoostingConfig,
    pub mlp: MlpConfig,
}

/// One model's identity, settings, and scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub model_id: String,
    pub hyperparameters: BTreeMap<String, String>,
    /// None when undefined (zero test variance) or when the fit failed.
    pub r2: Option<f64>,
    /// None when the fit failed.
    pub mse: Option<f64>,
    pub n_train: usize,
    pub n_test: usize,
    /// Failure or undefined-metric explanation.
    pub error: Option<String>,
}

/// Measured/predicted pairs for one model over the shared test rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelScatter {
    pub model_id: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkOutput {
    pub reports: Vec<ModelReport>,
    pub scatter: Vec<ModelScatter>,
}

fn hyper<K: ToString, V: ToString>(pairs: &[(K, V)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Trains and scores all five models on one shared split. A model failure
/// lands in its own report and never aborts the others.
pub fn run_benchmark(
    dataset: &Dataset,
    spec: &SplitSpec,
    config: &BenchmarkConfig,
) -> Result<BenchmarkOutput> {
    let (train, test) = train_test_split(dataset, spec)?;
    let forest_seed = derive_seed(spec.seed, 1);
    let mlp_seed = derive_seed(spec.seed, 2);

    type FitResult = Result<Vec<f64>>;
    let fits: Vec<(&str, BTreeMap<String, String>, FitResult)> = vec![
        (
            "poly_ridge",
            hyper(&[
                ("alpha", config.poly_ridge.alpha.to_string()),
                ("degree", config.poly_ridge.degree.to_string()),
            ]),
            (|| {
                let train_x = polynomial_features(&train.features, config.poly_ridge.degree)?;
                let model = fit_ridge(&train_x, &train.target, config.poly_ridge.alpha)?;
                let test_x = polynomial_features(&test.features, config.poly_ridge.degree)?;
                // expanded rows already start with the bias column
                Ok(test_x.iter().map(|r| model.predict_row(&r[1..])).collect())
            })(),
        ),
        (
            "decision_tree",
            hyper(&[
                ("max_depth", config.decision_tree.max_depth.to_string()),
                (
                    "min_samples_split",
                    config.decision_tree.min_samples_split.to_string(),
                ),
            ]),
            (|| {
                let model =
                    fit_decision_tree(&train.features, &train.target, &config.decision_tree)?;
                Ok(model.predict(&test.features))
            })(),
        ),
        (
            "random_forest",
            hyper(&[
                ("n_estimators", config.random_forest.n_estimators.to_string()),
                ("max_depth", config.random_forest.max_depth.to_string()),
                (
                    "min_samples_split",
                    config.random_forest.min_samples_split.to_string(),
                ),
                ("bootstrap", config.random_forest.bootstrap.to_string()),
                ("seed", forest_seed.to_string()),
            ]),
            (|| {
                let model = fit_random_forest(
                    &train.features,
                    &train.target,
                    &config.random_forest,
                    forest_seed,
                )?;
                Ok(model.predict(&test.features))
            })(),
        ),
        (
            "gradient_boosting",
            hyper(&[
                (
                    "learning_rate",
                    config.gradient_boosting.learning_rate.to_string(),
                ),
                (
                    "n_estimators",
                    config.gradient_boosting.n_estimators.to_string(),
                ),
                ("max_depth", config.gradient_boosting.max_depth.to_string()),
                (
                    "min_samples_split",
                    config.gradient_boosting.min_samples_split.to_string(),
                ),
            ]),
            (|| {
                let model =
                    fit_gradient_boosting(&train.features, &train.target, &config.gradient_boosting)?;
                Ok(model.predict(&test.features))
            })(),
        ),
        (
            "mlp",
            hyper(&[
                (
                    "hidden_layers",
                    config
                        .mlp
                        .hidden_layers
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join("x"),
                ),
                ("activation", config.mlp.activation.as_str().to_string()),
                ("learning_rate", config.mlp.learning_rate.to_string()),
                ("epochs", config.mlp.epochs.to_string()),
                ("batch_size", config.mlp.batch_size.to_string()),
                ("seed", mlp_seed.to_string()),
            ]),
            (|| {
                let model = fit_mlp(&train.features, &train.target, &config.mlp, mlp_seed)?;
                Ok(model.predict(&test.features))
            })(),
        ),
    ];

    let mut reports = Vec::with_capacity(fits.len());
    let mut scatter = Vec::new();
    for (model_id, hyperparameters, outcome) in fits {
        match outcome {
            Ok(predictions) => {
                let model_mse = mse(&test.target, &predictions)?;
                let (r2, note) = match r2_score(&test.target, &predictions) {
                    Ok(v) => (Some(v), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                reports.push(ModelReport {
                    model_id: model_id.to_string(),
                    hyperparameters,
                    r2,
                    mse: Some(model_mse),
                    n_train: train.n(),
                    n_test: test.n(),
                    error: note,
                });
                scatter.push(ModelScatter {
                    model_id: model_id.to_string(),
                    points: test
                        .target
                        .iter()
                        .copied()
                        .zip(predictions)
                        .collect(),
                });
            }
            Err(e) => reports.push(ModelReport {
                model_id: model_id.to_string(),
                hyperparameters,
                r2: None,
                mse: None,
                n_train: train.n(),
                n_test: test.n(),
                error: Some(e.to_string()),
            }),
        }
    }

    Ok(BenchmarkOutput { reports, scatter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn toy_dataset(n: usize) -> Dataset {
        let mut rng = DeterministicRng::seeded(1);
        let features: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                vec![
                    (rng.index(11)) as f64,
                    rng.next_f64() * 30.0,
                    rng.next_f64() * 800.0,
                    0.05 + rng.next_f64() * 0.9,
                ]
            })
            .collect();
        let target: Vec<f64> = features
            .iter()
            .map(|f| f[2] / f[3] * (1.0 - 0.075 * f[0]))
            .collect();
        Dataset { features, target }
    }

    #[test]
    fn split_sizes_follow_floor_arithmetic() {
        let d = toy_dataset(10);
        let (train, test) = train_test_split(&d, &SplitSpec::default()).unwrap();
        assert_eq!(train.n(), 8);
        assert_eq!(test.n(), 2);

        let d = toy_dataset(8784);
        let (train, test) = train_test_split(&d, &SplitSpec::default()).unwrap();
        assert_eq!(train.n(), 7027);
        assert_eq!(test.n(), 1757);
    }

    #[test]
    fn split_is_deterministic_and_a_partition() {
        let d = toy_dataset(100);
        let spec = SplitSpec::default();
        let (a_train, a_test) = train_test_split(&d, &spec).unwrap();
        let (b_train, b_test) = train_test_split(&d, &spec).unwrap();
        assert_eq!(a_train, b_train);
        assert_eq!(a_test, b_test);

        // partition: every original row appears exactly once
        let mut seen: Vec<f64> = a_train
            .target
            .iter()
            .chain(a_test.target.iter())
            .copied()
            .collect();
        seen.sort_by(f64::total_cmp);
        let mut expected = d.target.clone();
        expected.sort_by(f64::total_cmp);
        assert_eq!(seen, expected);
    }

    #[test]
    fn chronological_split_keeps_order() {
        let d = toy_dataset(10);
        let spec = SplitSpec {
            chronological: true,
            ..SplitSpec::default()
        };
        let (train, test) = train_test_split(&d, &spec).unwrap();
        assert_eq!(train.features, d.features[..8].to_vec());
        assert_eq!(test.features, d.features[8..].to_vec());
    }

    #[test]
    fn tiny_dataset_rejected() {
        let d = toy_dataset(1);
        assert!(train_test_split(&d, &SplitSpec::default()).is_err());
    }

    #[test]
    fn benchmark_reports_are_bit_identical_across_runs() {
        let d = toy_dataset(300);
        let spec = SplitSpec::default();
        let mut config = BenchmarkConfig::default();
        config.random_forest.n_estimators = 10;
        config.mlp.epochs = 5;
        let a = run_benchmark(&d, &spec, &config).unwrap();
        let b = run_benchmark(&d, &spec, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn constant_target_keeps_models_alive_without_r2() {
        let mut d = toy_dataset(60);
        d.target = vec![5.0; 60];
        let mut config = BenchmarkConfig::default();
        config.random_forest.n_estimators = 5;
        config.mlp.epochs = 30;
        let out = run_benchmark(&d, &SplitSpec::default(), &config).unwrap();
        assert_eq!(out.reports.len(), 5);
        for report in &out.reports {
            assert!(report.r2.is_none(), "{}", report.model_id);
            let mse = report.mse.expect("mse defined");
            assert!(mse < 1e-6, "{}: mse {mse}", report.model_id);
        }
        for s in &out.scatter {
            for (_, predicted) in &s.points {
                assert_abs_diff_eq!(*predicted, 5.0, epsilon = 1e-3);
            }
        }
    }

    #[test]
    fn one_model_failure_does_not_abort_the_others() {
        let d = toy_dataset(80);
        let mut config = BenchmarkConfig::default();
        config.gradient_boosting.learning_rate = 1.5; // invalid, fit must fail
        config.random_forest.n_estimators = 3;
        config.mlp.epochs = 2;
        let out = run_benchmark(&d, &SplitSpec::default(), &config).unwrap();
        assert_eq!(out.reports.len(), 5);

        let boosting = out
            .reports
            .iter()
            .find(|r| r.model_id == "gradient_boosting")
            .unwrap();
        assert!(boosting.mse.is_none());
        assert!(boosting.error.as_deref().unwrap().contains("learning rate"));

        let healthy = out.reports.iter().filter(|r| r.mse.is_some()).count();
        assert_eq!(healthy, 4);
        // scatter only covers the models that produced predictions
        assert_eq!(out.scatter.len(), 4);
        assert!(out.scatter.iter().all(|s| s.model_id != "gradient_boosting"));
    }

    #[test]
    fn scatter_counts_match_test_rows() {
        let d = toy_dataset(50);
        let mut config = BenchmarkConfig::default();
        config.random_forest.n_estimators = 3;
        config.mlp.epochs = 2;
        let out = run_benchmark(&d, &SplitSpec::default(), &config).unwrap();
        for s in &out.scatter {
            assert_eq!(s.points.len(), 10);
        }
    }
}
