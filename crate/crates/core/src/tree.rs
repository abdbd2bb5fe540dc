//! Decision tree induction with the gain-ratio criterion, plus bagged
//! ensembles over bootstrap resamples.
//!
//! Trees use binary threshold splits at midpoints between consecutive
//! distinct feature values. At every node the candidate with the highest
//! gain ratio (information gain over split entropy, logs base 2) wins;
//! ties keep the lowest feature index, then the lowest threshold. Growth
//! stops on purity, max depth, or the min-leaf floor. No pruning.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, HpcSample, Label};
use crate::error::{Error, Result};
use crate::model::Prediction;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    /// None grows without a depth bound.
    pub max_depth: Option<usize>,
    /// Minimum samples each side of a split must keep.
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: Some(20),
            min_leaf: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        label: Label,
        benign: u64,
        malware: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeModel {
    pub root: TreeNode,
    pub n_features: usize,
}

fn entropy(a: u64, b: u64) -> f64 {
    let n = (a + b) as f64;
    let mut h = 0.0;
    for c in [a, b] {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

/// Gain ratio from partition class counts (both sides non-empty).
fn gain_ratio_from_counts(left_b: u64, left_m: u64, right_b: u64, right_m: u64) -> f64 {
    let left_n = (left_b + left_m) as f64;
    let right_n = (right_b + right_m) as f64;
    let n = left_n + right_n;
    let gain = entropy(left_b + right_b, left_m + right_m)
        - (left_n / n) * entropy(left_b, left_m)
        - (right_n / n) * entropy(right_b, right_m);
    let split_info = entropy(left_n as u64, right_n as u64);
    if split_info == 0.0 {
        return 0.0;
    }
    gain / split_info
}

/// Gain ratio of the binary split `feature <= threshold` on a dataset.
pub fn gain_ratio(ds: &Dataset, feature_index: usize, threshold: f64) -> Result<f64> {
    if feature_index >= ds.n_features() {
        return Err(Error::Config(format!(
            "feature index {feature_index} out of range"
        )));
    }
    let mut counts = [[0u64; 2]; 2]; // [side][class]
    for s in &ds.samples {
        let side = usize::from(s.features[feature_index] > threshold);
        counts[side][s.label.as_u8() as usize] += 1;
    }
    let (left, right) = (counts[0], counts[1]);
    if left[0] + left[1] == 0 || right[0] + right[1] == 0 {
        return Err(Error::UndefinedSplit(format!(
            "threshold {threshold} leaves one side of feature {feature_index} empty"
        )));
    }
    Ok(gain_ratio_from_counts(left[0], left[1], right[0], right[1]))
}

struct Candidate {
    ratio: f64,
    feature: usize,
    threshold: f64,
}

fn class_counts(samples: &[&HpcSample]) -> (u64, u64) {
    let malware = samples.iter().filter(|s| s.label.is_malware()).count() as u64;
    (samples.len() as u64 - malware, malware)
}

fn make_leaf(benign: u64, malware: u64) -> TreeNode {
    TreeNode::Leaf {
        label: if malware > benign {
            Label::Malware
        } else {
            Label::Benign
        },
        benign,
        malware,
    }
}

fn best_split(samples: &[&HpcSample], n_features: usize, min_leaf: usize) -> Option<Candidate> {
    let n = samples.len();
    let (total_b, total_m) = class_counts(samples);
    let mut best: Option<Candidate> = None;
    for feature in 0..n_features {
        let mut col: Vec<(f64, bool)> = samples
            .iter()
            .map(|s| (s.features[feature], s.label.is_malware()))
            .collect();
        col.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left_b = 0u64;
        let mut left_m = 0u64;
        for i in 0..n - 1 {
            if col[i].1 {
                left_m += 1;
            } else {
                left_b += 1;
            }
            if col[i].0 == col[i + 1].0 {
                continue;
            }
            let left_n = i + 1;
            if left_n < min_leaf || n - left_n < min_leaf {
                continue;
            }
            let ratio = gain_ratio_from_counts(left_b, left_m, total_b - left_b, total_m - left_m);
            if best.as_ref().is_none_or(|b| ratio > b.ratio) {
                best = Some(Candidate {
                    ratio,
                    feature,
                    threshold: (col[i].0 + col[i + 1].0) / 2.0,
                });
            }
        }
    }
    best
}

fn build(samples: &[&HpcSample], n_features: usize, cfg: &TreeConfig, depth: usize) -> TreeNode {
    let (benign, malware) = class_counts(samples);
    if benign == 0 || malware == 0 || cfg.max_depth.is_some_and(|d| depth >= d) {
        return make_leaf(benign, malware);
    }
    let Some(split) = best_split(samples, n_features, cfg.min_leaf.max(1)) else {
        return make_leaf(benign, malware);
    };
    let (left, right): (Vec<&HpcSample>, Vec<&HpcSample>) = samples
        .iter()
        .partition(|s| s.features[split.feature] <= split.threshold);
    if left.is_empty() || right.is_empty() {
        return make_leaf(benign, malware);
    }
    TreeNode::Internal {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(build(&left, n_features, cfg, depth + 1)),
        right: Box::new(build(&right, n_features, cfg, depth + 1)),
    }
}

/// Greedy recursive induction.
pub fn train_tree(ds: &Dataset, cfg: &TreeConfig) -> Result<DecisionTreeModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let refs: Vec<&HpcSample> = ds.samples.iter().collect();
    Ok(DecisionTreeModel {
        root: build(&refs, ds.n_features(), cfg, 0),
        n_features: ds.n_features(),
    })
}

impl TreeNode {
    fn descend(&self, x: &[f64]) -> (&TreeNode, Label, f64) {
        match self {
            TreeNode::Leaf {
                label,
                benign,
                malware,
            } => (self, *label, *malware as f64 / (*benign + *malware) as f64),
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.descend(x)
                } else {
                    right.descend(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    fn render(&self, names: &[String], indent: usize, out: &mut String) {
        let pad = "  ".repeat(indent);
        match self {
            TreeNode::Leaf {
                label,
                benign,
                malware,
            } => {
                out.push_str(&format!(
                    "{pad}predict {label} (benign={benign}, malware={malware})\n"
                ));
            }
            TreeNode::Internal {
                feature,
                threshold,
                left,
                right,
            } => {
                out.push_str(&format!(
                    "{pad}if {} <= {:?} then\n",
                    names[*feature], threshold
                ));
                left.render(names, indent + 1, out);
                out.push_str(&format!("{pad}else\n"));
                right.render(names, indent + 1, out);
            }
        }
    }
}

impl DecisionTreeModel {
    /// Root-to-leaf descent; the score is the leaf's malware fraction.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let (_, label, score) = self.root.descend(x);
        Ok(Prediction { label, score })
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn leaf_count(&self) -> usize {
        self.node_count().div_ceil(2)
    }

    /// Indented if-then text, one line per node.
    pub fn explain(&self, feature_names: &[String]) -> String {
        let mut out = String::new();
        self.root.render(feature_names, 0, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggedConfig {
    pub n_trees: usize,
    pub tree: TreeConfig,
    pub seed: u64,
    /// Diagnostic switch: false trains every tree on the full dataset.
    pub bootstrap: bool,
}

impl Default for BaggedConfig {
    fn default() -> Self {
        BaggedConfig {
            n_trees: 25,
            tree: TreeConfig::default(),
            seed: 2,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggedModel {
    pub trees: Vec<DecisionTreeModel>,
    pub seed: u64,
}

/// Trains `n_trees` trees, each on a bootstrap resample of the full
/// training size (with replacement). Per-tree seeds derive from the
/// master seed, so the ensemble is reproducible and trees could be grown
/// concurrently without changing the result.
pub fn train_bagged(ds: &Dataset, cfg: &BaggedConfig) -> Result<BaggedModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cfg.n_trees == 0 {
        return Err(Error::Config("ensemble needs at least one tree".into()));
    }
    let n = ds.len();
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for t in 0..cfg.n_trees {
        let resample = if cfg.bootstrap {
            let mut rng = Rng::derive(cfg.seed, t as u64);
            let samples = (0..n)
                .map(|_| ds.samples[rng.next_index(n)].clone())
                .collect();
            Dataset {
                samples,
                feature_names: ds.feature_names.clone(),
                provenance: ds.provenance,
            }
        } else {
            ds.clone()
        };
        trees.push(train_tree(&resample, &cfg.tree)?);
    }
    Ok(BaggedModel {
        trees,
        seed: cfg.seed,
    })
}

impl BaggedModel {
    pub fn n_features(&self) -> usize {
        self.trees.first().map(|t| t.n_features).unwrap_or(0)
    }

    /// Plurality vote over the trees; ties go to benign. The score is the
    /// malware vote fraction.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let mut malware_votes = 0usize;
        for tree in &self.trees {
            if tree.predict(x)?.label.is_malware() {
                malware_votes += 1;
            }
        }
        let t = self.trees.len();
        let label = if 2 * malware_votes > t {
            Label::Malware
        } else {
            Label::Benign
        };
        Ok(Prediction {
            label,
            score: malware_votes as f64 / t as f64,
        })
    }
}
