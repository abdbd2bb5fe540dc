//! K-nearest-neighbor classifier.
//!
//! Lazy learner: training stores the (scaled) samples, prediction takes a
//! majority vote among the k nearest training points. k is kept odd so
//! the vote always has a majority. Distance ties break toward the lower
//! training index.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::model::Prediction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMetric {
    Euclidean,
    Manhattan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: DistanceMetric,
}

impl Default for KnnConfig {
    fn default() -> Self {
        KnnConfig {
            k: 5,
            metric: DistanceMetric::Euclidean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
    pub k: usize,
    pub metric: DistanceMetric,
}

/// Square root of the summed squared componentwise differences.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Sum of absolute componentwise differences.
pub fn manhattan_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

pub fn train_knn(ds: &Dataset, cfg: &KnnConfig) -> Result<KnnModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cfg.k == 0 || cfg.k.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "k must be a positive odd number, got {}",
            cfg.k
        )));
    }
    if cfg.k > ds.len() {
        return Err(Error::Config(format!(
            "k = {} exceeds the training size {}",
            cfg.k,
            ds.len()
        )));
    }
    Ok(KnnModel {
        features: ds.samples.iter().map(|s| s.features.clone()).collect(),
        labels: ds.labels(),
        k: cfg.k,
        metric: cfg.metric,
    })
}

impl KnnModel {
    pub fn n_features(&self) -> usize {
        self.features.first().map(|f| f.len()).unwrap_or(0)
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        match self.metric {
            DistanceMetric::Euclidean => euclidean_distance(a, b),
            DistanceMetric::Manhattan => manhattan_distance(a, b),
        }
    }

    /// Majority label among the k nearest neighbors; the score is the
    /// malware fraction of the vote.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        // Bounded insertion keeps the k best (distance, index) pairs in
        // order; full sorting is left to the test oracle.
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(self.k + 1);
        for (i, f) in self.features.iter().enumerate() {
            let d = self.distance(x, f)?;
            let pos = best.partition_point(|&(bd, bi)| (bd, bi) < (d, i));
            if pos < self.k {
                best.insert(pos, (d, i));
                best.truncate(self.k);
            }
        }
        let malware_votes = best
            .iter()
            .filter(|&&(_, i)| self.labels[i].is_malware())
            .count();
        let score = malware_votes as f64 / self.k as f64;
        let label = if 2 * malware_votes > self.k {
            Label::Malware
        } else {
            Label::Benign
        };
        Ok(Prediction { label, score })
    }
}
