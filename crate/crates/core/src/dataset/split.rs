//! Zero-day train/test partition.
//!
//! Malware samples are routed by family membership so the test set
//! contains only families the training set never saw. Benign samples are
//! split by a seeded shuffle at the configured ratio.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use super::{Dataset, Family, Label};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Split protocol parameters. The default mirrors the standard protocol:
/// five families in training, four held out, benign ratio 0.8.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_families: BTreeSet<Family>,
    pub test_families: BTreeSet<Family>,
    pub benign_ratio: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            train_families: [
                Family::Backdoor,
                Family::Worm,
                Family::Virus,
                Family::Rootkit,
                Family::Botnet,
            ]
            .into_iter()
            .collect(),
            test_families: [
                Family::Ransomware,
                Family::Spyware,
                Family::Adware,
                Family::Trojan,
            ]
            .into_iter()
            .collect(),
            benign_ratio: 0.8,
            seed: 7,
        }
    }
}

/// A disjoint train/test partition with the zero-day property.
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub train: Dataset,
    pub test: Dataset,
    pub train_families: BTreeSet<Family>,
    pub test_families: BTreeSet<Family>,
}

/// Partitions a dataset by malware family, keeping `benign_ratio` of the
/// benign samples in training. Sample order within each side follows the
/// input dataset.
pub fn zero_day_split(ds: &Dataset, cfg: &SplitConfig) -> Result<SplitPair> {
    if cfg.train_families.is_empty() || cfg.test_families.is_empty() {
        return Err(Error::Protocol("family sets must be non-empty".into()));
    }
    let overlap: Vec<&Family> = cfg
        .train_families
        .intersection(&cfg.test_families)
        .collect();
    if let Some(f) = overlap.first() {
        return Err(Error::Protocol(format!(
            "family `{f}` appears in both train and test sets"
        )));
    }
    if !(cfg.benign_ratio > 0.0 && cfg.benign_ratio < 1.0) {
        return Err(Error::Protocol(format!(
            "benign_ratio must lie in (0, 1), got {}",
            cfg.benign_ratio
        )));
    }

    let present: BTreeSet<Family> = ds.samples.iter().filter_map(|s| s.family).collect();
    for f in cfg.train_families.iter().chain(&cfg.test_families) {
        if !present.contains(f) {
            return Err(Error::MissingFamily(*f));
        }
    }
    let benign_indices: Vec<usize> = ds
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.label == Label::Benign)
        .map(|(i, _)| i)
        .collect();
    if benign_indices.is_empty() {
        return Err(Error::Protocol("dataset has no benign samples".into()));
    }

    // Seeded shuffle picks which benign rows go to training; original row
    // order is preserved when assembling each side.
    let n_train_benign = ((benign_indices.len() as f64) * cfg.benign_ratio).round() as usize;
    let mut shuffled = benign_indices.clone();
    Rng::new(cfg.seed).shuffle(&mut shuffled);
    let mut to_train = vec![false; ds.len()];
    for &i in shuffled.iter().take(n_train_benign) {
        to_train[i] = true;
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, s) in ds.samples.iter().enumerate() {
        match s.family {
            Some(f) if cfg.train_families.contains(&f) => train.push(s.clone()),
            Some(f) if cfg.test_families.contains(&f) => test.push(s.clone()),
            Some(_) => {} // family outside the protocol: dropped
            None => {
                if to_train[i] {
                    train.push(s.clone());
                } else {
                    test.push(s.clone());
                }
            }
        }
    }

    Ok(SplitPair {
        train: Dataset {
            samples: train,
            feature_names: ds.feature_names.clone(),
            provenance: ds.provenance,
        },
        test: Dataset {
            samples: test,
            feature_names: ds.feature_names.clone(),
            provenance: ds.provenance,
        },
        train_families: cfg.train_families.clone(),
        test_families: cfg.test_families.clone(),
    })
}
