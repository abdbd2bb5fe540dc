//! The uniform classifier contract: every trained model is immutable and
//! exposes a deterministic `predict` returning a label plus a calibrated
//! score in [0, 1].
//!
//! Score calibration maps each model's decision threshold to 0.5, so
//! score > 0.5 always means malware and score < 0.5 always means benign.
//! At an exact 0.5 the tie-break is model-specific: sigmoid-style models
//! follow the >= convention and predict malware, vote- and count-based
//! models (trees, rules) break toward benign.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::knn::KnnModel;
use crate::linear::LinearModel;
use crate::mlp::MlpModel;
use crate::rules::RuleListModel;
use crate::tree::{BaggedModel, DecisionTreeModel};

/// One classification outcome. `score` is the confidence that the sample
/// is malware.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Label,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelType {
    Knn,
    Mlp,
    DecisionTree,
    BaggedTrees,
    Svm,
    LogisticRegression,
    OneR,
    ManyRulesOneR,
}

impl ModelType {
    pub const ALL: [ModelType; 8] = [
        ModelType::Knn,
        ModelType::Mlp,
        ModelType::DecisionTree,
        ModelType::BaggedTrees,
        ModelType::Svm,
        ModelType::LogisticRegression,
        ModelType::OneR,
        ModelType::ManyRulesOneR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelType::Knn => "knn",
            ModelType::Mlp => "mlp",
            ModelType::DecisionTree => "decision_tree",
            ModelType::BaggedTrees => "bagged_trees",
            ModelType::Svm => "svm",
            ModelType::LogisticRegression => "logistic_regression",
            ModelType::OneR => "oner",
            ModelType::ManyRulesOneR => "many_rules_oner",
        }
    }
}

impl fmt::Display for ModelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelType {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelType> {
        ModelType::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model type `{s}`")))
    }
}

/// Immutable fitted parameters for any of the supported classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model_type", rename_all = "snake_case")]
pub enum TrainedModel {
    Knn(KnnModel),
    Mlp(MlpModel),
    DecisionTree(DecisionTreeModel),
    BaggedTrees(BaggedModel),
    Svm(LinearModel),
    LogisticRegression(LinearModel),
    OneR(RuleListModel),
    ManyRulesOneR(RuleListModel),
}

impl TrainedModel {
    pub fn model_type(&self) -> ModelType {
        match self {
            TrainedModel::Knn(_) => ModelType::Knn,
            TrainedModel::Mlp(_) => ModelType::Mlp,
            TrainedModel::DecisionTree(_) => ModelType::DecisionTree,
            TrainedModel::BaggedTrees(_) => ModelType::BaggedTrees,
            TrainedModel::Svm(_) => ModelType::Svm,
            TrainedModel::LogisticRegression(_) => ModelType::LogisticRegression,
            TrainedModel::OneR(_) => ModelType::OneR,
            TrainedModel::ManyRulesOneR(_) => ModelType::ManyRulesOneR,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Knn(m) => m.n_features(),
            TrainedModel::Mlp(m) => m.input_dim,
            TrainedModel::DecisionTree(m) => m.n_features,
            TrainedModel::BaggedTrees(m) => m.n_features(),
            TrainedModel::Svm(m) | TrainedModel::LogisticRegression(m) => m.weights.len(),
            TrainedModel::OneR(m) | TrainedModel::ManyRulesOneR(m) => m.n_features,
        }
    }

    /// Deterministic label + calibrated score for one feature vector.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match self {
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Mlp(m) => m.predict(x),
            TrainedModel::DecisionTree(m) => m.predict(x),
            TrainedModel::BaggedTrees(m) => m.predict(x),
            TrainedModel::Svm(m) | TrainedModel::LogisticRegression(m) => m.predict(x),
            TrainedModel::OneR(m) | TrainedModel::ManyRulesOneR(m) => m.predict(x),
        }
    }

    /// Predictions for every sample of a dataset.
    pub fn predict_dataset(&self, ds: &crate::dataset::Dataset) -> Result<Vec<Prediction>> {
        ds.samples
            .iter()
            .map(|s| self.predict(&s.features))
            .collect()
    }
}
