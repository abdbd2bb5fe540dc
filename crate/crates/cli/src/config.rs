//! Experiment configuration: one JSON document drives the whole run.
//! Every field has a default, so `{}` is a valid config describing the
//! synthetic benchmark.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use hmd_core::cost::CostTable;
use hmd_core::dataset::{generate_synthetic, parse_csv, Dataset, GeneratorConfig, SplitConfig};
use hmd_core::error::{Error, Result};
use hmd_core::knn::KnnConfig;
use hmd_core::linear::{LogRegConfig, SvmConfig};
use hmd_core::mlp::MlpConfig;
use hmd_core::rules::{ManyRulesConfig, OneRConfig};
use hmd_core::tree::{BaggedConfig, TreeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    /// Ingest an existing CSV file.
    Csv(PathBuf),
    /// Generate a synthetic dataset.
    Generator(GeneratorConfig),
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Generator(GeneratorConfig::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub k: usize,
    pub bins: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { k: 4, bins: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub split: SplitConfig,
    pub selection: SelectionConfig,
    pub knn: KnnConfig,
    pub mlp: MlpConfig,
    pub decision_tree: TreeConfig,
    pub bagged_trees: BaggedConfig,
    pub svm: SvmConfig,
    pub logistic_regression: LogRegConfig,
    pub oner: OneRConfig,
    pub many_rules_oner: ManyRulesConfig,
    pub cost_table: CostTable,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Reseeds every randomized stage from one master seed.
    pub fn override_seed(&mut self, master: u64) {
        if let DatasetSource::Generator(g) = &mut self.dataset {
            g.seed = master;
        }
        self.split.seed = master.wrapping_add(1);
        self.mlp.seed = master.wrapping_add(2);
        self.bagged_trees.seed = master.wrapping_add(3);
        self.svm.seed = master.wrapping_add(4);
        self.logistic_regression.seed = master.wrapping_add(5);
    }

    /// Loads or generates the configured dataset.
    pub fn load_dataset(&self) -> Result<Dataset> {
        match &self.dataset {
            DatasetSource::Csv(path) => parse_csv(path),
            DatasetSource::Generator(g) => generate_synthetic(g),
        }
    }
}
