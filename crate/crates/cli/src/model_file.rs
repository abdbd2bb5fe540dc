//! Versioned JSON model persistence. Floats serialize at full round-trip
//! precision, so a loaded model predicts bit-identically to the one that
//! was saved.

use serde::{Deserialize, Serialize};
use std::path::Path;

use hmd_core::dataset::{Dataset, ScalingParams};
use hmd_core::error::{Error, Result};
use hmd_core::knn::train_knn;
use hmd_core::linear::{logreg_train, svm_train};
use hmd_core::mlp::train_mlp;
use hmd_core::model::{ModelType, TrainedModel};
use hmd_core::rules::{train_classic_oner, train_many_rules};
use hmd_core::tree::{train_bagged, train_tree};

use crate::config::ExperimentConfig;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    /// Min-max ranges fitted on the training features; applied to raw
    /// inputs before prediction.
    pub scaling: Option<ScalingParams>,
    #[serde(flatten)]
    pub model: TrainedModel,
}

impl ModelFile {
    pub fn new(
        model: TrainedModel,
        feature_names: Vec<String>,
        scaling: Option<ScalingParams>,
    ) -> ModelFile {
        ModelFile {
            format_version: FORMAT_VERSION,
            feature_names,
            scaling,
            model,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Model(format!("model serialization failed: {e}")))?;
        std::fs::write(path, json + "\n").map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let file: ModelFile = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        Ok(file)
    }

    /// Reorders a raw dataset's columns to this model's schema, applying
    /// the stored scaling. Errors name any missing feature.
    pub fn prepare(&self, ds: &Dataset) -> Result<Dataset> {
        let indices = self
            .feature_names
            .iter()
            .map(|name| {
                ds.feature_names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::Config(format!("dataset is missing feature `{name}`")))
            })
            .collect::<Result<Vec<usize>>>()?;
        let projected = ds.project(&indices)?;
        match &self.scaling {
            Some(p) => hmd_core::dataset::apply_scaling(&projected, p),
            None => Ok(projected),
        }
    }
}

/// Trains one model type with the hyperparameters from the experiment
/// config. The dataset must already be scaled.
pub fn train_by_type(
    model_type: ModelType,
    train: &Dataset,
    cfg: &ExperimentConfig,
) -> Result<TrainedModel> {
    Ok(match model_type {
        ModelType::Knn => TrainedModel::Knn(train_knn(train, &cfg.knn)?),
        ModelType::Mlp => TrainedModel::Mlp(train_mlp(train, &cfg.mlp)?),
        ModelType::DecisionTree => {
            TrainedModel::DecisionTree(train_tree(train, &cfg.decision_tree)?)
        }
        ModelType::BaggedTrees => {
            TrainedModel::BaggedTrees(train_bagged(train, &cfg.bagged_trees)?)
        }
        ModelType::Svm => TrainedModel::Svm(svm_train(train, &cfg.svm)?),
        ModelType::LogisticRegression => {
            TrainedModel::LogisticRegression(logreg_train(train, &cfg.logistic_regression)?)
        }
        ModelType::OneR => TrainedModel::OneR(train_classic_oner(train, &cfg.oner)?),
        ModelType::ManyRulesOneR => {
            TrainedModel::ManyRulesOneR(train_many_rules(train, &cfg.many_rules_oner)?)
        }
    })
}
