//! Per-feature min-max scaling fitted on training data.

use serde::{Deserialize, Serialize};

use super::{Dataset, HpcSample};
use crate::error::{Error, Result};

/// Per-feature (min, max) ranges fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub ranges: Vec<(f64, f64)>,
}

impl ScalingParams {
    pub fn n_features(&self) -> usize {
        self.ranges.len()
    }

    /// Maps one raw vector to scaled space: (v - min) / (max - min), with
    /// constant features pinned to 0. Unclamped, so values outside the
    /// fitted range map outside [0, 1].
    pub fn scale_vector(&self, features: &[f64]) -> Result<Vec<f64>> {
        if features.len() != self.ranges.len() {
            return Err(Error::DimensionMismatch {
                expected: self.ranges.len(),
                got: features.len(),
            });
        }
        Ok(features
            .iter()
            .zip(&self.ranges)
            .map(|(&v, &(min, max))| {
                if max > min {
                    (v - min) / (max - min)
                } else {
                    0.0
                }
            })
            .collect())
    }
}

/// Fits min-max ranges on a training set.
pub fn fit_scaling(train: &Dataset) -> Result<ScalingParams> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let ranges = (0..train.n_features())
        .map(|j| {
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for s in &train.samples {
                min = min.min(s.features[j]);
                max = max.max(s.features[j]);
            }
            (min, max)
        })
        .collect();
    Ok(ScalingParams { ranges })
}

/// Applies fitted ranges to a dataset, preserving labels and families.
pub fn apply_scaling(ds: &Dataset, params: &ScalingParams) -> Result<Dataset> {
    if ds.n_features() != params.n_features() {
        return Err(Error::DimensionMismatch {
            expected: params.n_features(),
            got: ds.n_features(),
        });
    }
    let samples = ds
        .samples
        .iter()
        .map(|s| {
            Ok(HpcSample {
                features: params.scale_vector(&s.features)?,
                label: s.label,
                family: s.family,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        samples,
        feature_names: ds.feature_names.clone(),
        provenance: ds.provenance,
    })
}
