//! Sample and dataset model: HPC observations, CSV ingestion, the
//! zero-day family split, min-max scaling, and a synthetic generator.

mod csv_io;
mod scaling;
mod split;
mod synthetic;

pub use csv_io::{parse_csv, parse_csv_reader, write_csv, write_csv_string};
pub use scaling::{apply_scaling, fit_scaling, ScalingParams};
pub use split::{zero_day_split, SplitConfig, SplitPair};
pub use synthetic::{generate_synthetic, FamilySpec, GeneratorConfig};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Canonical names of the four selected counters, in CSV column order.
pub const FEATURE_NAMES: [&str; 4] = [
    "node-loads",
    "dTLB-stores",
    "branch-instructions",
    "cyclesct",
];

/// Raw captures carry at most this many counter columns.
pub const MAX_RAW_FEATURES: usize = 16;

/// Binary target class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Benign,
    Malware,
}

impl Label {
    pub fn from_u8(v: u8) -> Option<Label> {
        match v {
            0 => Some(Label::Benign),
            1 => Some(Label::Malware),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Label::Benign => 0,
            Label::Malware => 1,
        }
    }

    /// Target encoding for tanh-output models: benign -1, malware +1.
    pub fn target_pm1(self) -> f64 {
        match self {
            Label::Benign => -1.0,
            Label::Malware => 1.0,
        }
    }

    pub fn is_malware(self) -> bool {
        self == Label::Malware
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Benign => write!(f, "benign"),
            Label::Malware => write!(f, "malware"),
        }
    }
}

/// Malware family tag. Absent (`None` in [`HpcSample`]) means benign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Backdoor,
    Worm,
    Virus,
    Rootkit,
    Botnet,
    Ransomware,
    Spyware,
    Adware,
    Trojan,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Backdoor,
        Family::Worm,
        Family::Virus,
        Family::Rootkit,
        Family::Botnet,
        Family::Ransomware,
        Family::Spyware,
        Family::Adware,
        Family::Trojan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Backdoor => "backdoor",
            Family::Worm => "worm",
            Family::Virus => "virus",
            Family::Rootkit => "rootkit",
            Family::Botnet => "botnet",
            Family::Ransomware => "ransomware",
            Family::Spyware => "spyware",
            Family::Adware => "adware",
            Family::Trojan => "trojan",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown malware family `{s}`")))
    }
}

/// One HPC observation: counter values, class label, optional family tag.
///
/// At ingestion every counter is finite and non-negative. Derived views
/// (min-max scaled copies) may leave that range because scaling is
/// deliberately unclamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpcSample {
    pub features: Vec<f64>,
    pub label: Label,
    pub family: Option<Family>,
}

impl HpcSample {
    pub fn new(features: Vec<f64>, label: Label, family: Option<Family>) -> Result<HpcSample> {
        let sample = HpcSample {
            features,
            label,
            family,
        };
        sample.check_family_consistency()?;
        Ok(sample)
    }

    /// family = none implies benign; a family tag implies malware.
    pub fn check_family_consistency(&self) -> Result<()> {
        match (self.label, self.family) {
            (Label::Malware, None) => Err(Error::Protocol(
                "malware sample is missing a family tag".into(),
            )),
            (Label::Benign, Some(f)) => Err(Error::Protocol(format!(
                "benign sample carries family tag `{f}`"
            ))),
            _ => Ok(()),
        }
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Ingested,
    Synthetic,
}

/// An ordered collection of samples sharing one feature schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub samples: Vec<HpcSample>,
    pub feature_names: Vec<String>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(
        samples: Vec<HpcSample>,
        feature_names: Vec<String>,
        provenance: Provenance,
    ) -> Result<Dataset> {
        let ds = Dataset {
            samples,
            feature_names,
            provenance,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.feature_names.len();
        for (i, s) in self.samples.iter().enumerate() {
            if s.features.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.features.len(),
                });
            }
            s.check_family_consistency().map_err(|_| {
                Error::Protocol(format!("sample {i}: family tag inconsistent with label"))
            })?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_column(&self, index: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.features[index]).collect()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.samples.iter().filter(|s| s.label == label).count()
    }

    pub fn has_both_classes(&self) -> bool {
        self.count_label(Label::Malware) > 0 && self.count_label(Label::Benign) > 0
    }

    /// New dataset keeping only the given feature indices, in the given order.
    pub fn project(&self, indices: &[usize]) -> Result<Dataset> {
        for &i in indices {
            if i >= self.n_features() {
                return Err(Error::Config(format!(
                    "feature index {i} out of range (dataset has {})",
                    self.n_features()
                )));
            }
        }
        let feature_names = indices
            .iter()
            .map(|&i| self.feature_names[i].clone())
            .collect();
        let samples = self
            .samples
            .iter()
            .map(|s| HpcSample {
                features: indices.iter().map(|&i| s.features[i]).collect(),
                label: s.label,
                family: s.family,
            })
            .collect();
        Ok(Dataset {
            samples,
            feature_names,
            provenance: self.provenance,
        })
    }
}
