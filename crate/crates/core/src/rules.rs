//! Single-feature rule-list classifiers: classic OneR over quantile value
//! buckets, and a many-rules variant that subdivides the chosen feature's
//! range into labeled intervals.
//!
//! Intervals use the lower-exclusive, upper-inclusive convention
//! `lower < x <= upper`. The first interval opens at the minimum training
//! value; the last runs to +inf. Queries at or below the minimum fall to
//! the model's default label unless an exact-value base case matches.
//! Adjacent intervals never share a label (same-label neighbors are
//! merged during construction).

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::feature_selection::discretize;
use crate::model::Prediction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleVariant {
    Classic,
    ManyRules,
}

/// One labeled interval `lower < x <= upper` on the chosen feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleInterval {
    pub feature_index: usize,
    #[serde(with = "extended_f64")]
    pub lower: f64,
    #[serde(with = "extended_f64")]
    pub upper: f64,
    pub label: Label,
    pub support: u64,
    pub purity: f64,
}

/// Exact-value shortcut rule, checked before the intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseCaseRule {
    pub value: f64,
    pub label: Label,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleListModel {
    pub variant: RuleVariant,
    pub feature_index: usize,
    pub n_features: usize,
    pub base_cases: Vec<BaseCaseRule>,
    pub intervals: Vec<RuleInterval>,
    pub default_label: Label,
    /// Training accuracy of the candidate rule list built per feature.
    pub feature_accuracies: Vec<f64>,
    /// Training accuracy of the chosen feature's rule list.
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneRConfig {
    /// Quantile bucket count for the classic variant.
    pub bins: usize,
}

impl Default for OneRConfig {
    fn default() -> Self {
        OneRConfig { bins: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyRulesConfig {
    /// An exact value becomes a base case once it occurs this often with
    /// a unanimous class.
    pub base_case_min_support: u64,
}

impl Default for ManyRulesConfig {
    fn default() -> Self {
        ManyRulesConfig {
            base_case_min_support: 5,
        }
    }
}

/// Serializes +-inf interval bounds as strings, since JSON has no
/// infinity literal.
mod extended_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("invalid bound `{other}`"))),
            },
        }
    }
}

/// A maximal run of sorted samples sharing one rule bucket.
struct Segment {
    first_value: f64,
    last_value: f64,
    benign: u64,
    malware: u64,
}

impl Segment {
    fn label(&self) -> Label {
        if self.malware > self.benign {
            Label::Malware
        } else {
            Label::Benign
        }
    }

    fn majority_count(&self) -> u64 {
        self.benign.max(self.malware)
    }

    fn support(&self) -> u64 {
        self.benign + self.malware
    }
}

/// Sorted (value, label) pairs; benign sorts before malware within equal
/// values so segmentation is invariant to training row order.
fn sorted_column(ds: &Dataset, feature: usize) -> Vec<(f64, Label)> {
    let mut col: Vec<(f64, Label)> = ds
        .samples
        .iter()
        .map(|s| (s.features[feature], s.label))
        .collect();
    col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.as_u8().cmp(&b.1.as_u8())));
    col
}

fn segments_from_boundaries(col: &[(f64, Label)], boundary_after: &[bool]) -> Vec<Segment> {
    let mut segments = Vec::new();
    let mut start = 0;
    for i in 0..col.len() {
        let last = i + 1 == col.len();
        if last || boundary_after[i] {
            let slice = &col[start..=i];
            let malware = slice.iter().filter(|(_, l)| l.is_malware()).count() as u64;
            segments.push(Segment {
                first_value: slice[0].0,
                last_value: slice[slice.len() - 1].0,
                benign: slice.len() as u64 - malware,
                malware,
            });
            start = i + 1;
        }
    }
    segments
}

/// Classic OneR bucketing: equal-frequency quantile bins.
fn classic_segments(col: &[(f64, Label)], bins: usize) -> Result<Vec<Segment>> {
    let values: Vec<f64> = col.iter().map(|&(v, _)| v).collect();
    let ids = discretize(&values, bins)?; // sorted input keeps ids sorted
    let boundary_after: Vec<bool> = (0..col.len())
        .map(|i| i + 1 < col.len() && ids[i] != ids[i + 1])
        .collect();
    Ok(segments_from_boundaries(col, &boundary_after))
}

/// Many-rules cut placement: walking the sorted samples, a cut lands
/// between two consecutive samples when the value strictly increases, the
/// class changes, and the closing class has repeated at least once since
/// the previous cut.
fn many_rules_segments(col: &[(f64, Label)]) -> Vec<Segment> {
    let n = col.len();
    let mut boundary_after = vec![false; n];
    let mut run_len = 1u64;
    for i in 0..n.saturating_sub(1) {
        let (v, l) = col[i];
        let (next_v, next_l) = col[i + 1];
        if next_l != l && next_v > v && run_len >= 2 {
            boundary_after[i] = true;
        }
        run_len = if next_l == l { run_len + 1 } else { 1 };
    }
    segments_from_boundaries(col, &boundary_after)
}

/// Converts segments into chained intervals: each upper bound is the
/// closing segment's last value, the final upper is +inf, and same-label
/// neighbors merge. A first segment confined to the minimum value opens
/// at -inf so its samples stay covered; otherwise the first lower bound
/// is the minimum training value, exclusive.
fn intervals_from_segments(segments: &[Segment], feature: usize) -> Vec<RuleInterval> {
    let min_value = segments[0].first_value;
    let mut intervals: Vec<RuleInterval> = Vec::with_capacity(segments.len());
    let mut majority_counts: Vec<u64> = Vec::with_capacity(segments.len());
    for (i, seg) in segments.iter().enumerate() {
        let lower = if i == 0 {
            min_value
        } else {
            segments[i - 1].last_value
        };
        let upper = if i + 1 == segments.len() {
            f64::INFINITY
        } else {
            seg.last_value
        };
        let lower = if lower == upper {
            f64::NEG_INFINITY
        } else {
            lower
        };
        let label = seg.label();

        if let Some(prev) = intervals.last_mut() {
            if prev.label == label {
                prev.upper = upper;
                prev.support += seg.support();
                *majority_counts.last_mut().unwrap() += seg.majority_count();
                prev.purity = *majority_counts.last().unwrap() as f64 / prev.support as f64;
                continue;
            }
        }
        intervals.push(RuleInterval {
            feature_index: feature,
            lower,
            upper,
            label,
            support: seg.support(),
            purity: seg.majority_count() as f64 / seg.support() as f64,
        });
        majority_counts.push(seg.majority_count());
    }
    intervals
}

fn base_cases(col: &[(f64, Label)], min_support: u64) -> Vec<BaseCaseRule> {
    let mut cases = Vec::new();
    let mut start = 0;
    for i in 0..col.len() {
        if i + 1 == col.len() || col[i + 1].0 != col[start].0 {
            let slice = &col[start..=i];
            let count = slice.len() as u64;
            let first = slice[0].1;
            if count >= min_support && slice.iter().all(|&(_, l)| l == first) {
                cases.push(BaseCaseRule {
                    value: slice[0].0,
                    label: first,
                    support: count,
                });
            }
            start = i + 1;
        }
    }
    cases
}

fn global_majority(ds: &Dataset) -> Label {
    let malware = ds.count_label(Label::Malware);
    if malware * 2 > ds.len() {
        Label::Malware
    } else {
        Label::Benign
    }
}

struct Candidate {
    base_cases: Vec<BaseCaseRule>,
    intervals: Vec<RuleInterval>,
    accuracy: f64,
}

fn classify(
    base_cases: &[BaseCaseRule],
    intervals: &[RuleInterval],
    default_label: Label,
    v: f64,
) -> Prediction {
    if let Ok(i) = base_cases.binary_search_by(|c| c.value.total_cmp(&v)) {
        let label = base_cases[i].label;
        return Prediction {
            label,
            score: if label.is_malware() { 1.0 } else { 0.0 },
        };
    }
    let idx = intervals.partition_point(|iv| iv.upper < v);
    if let Some(iv) = intervals.get(idx) {
        if iv.lower < v && v <= iv.upper {
            return Prediction {
                label: iv.label,
                score: if iv.label.is_malware() {
                    iv.purity
                } else {
                    1.0 - iv.purity
                },
            };
        }
    }
    Prediction {
        label: default_label,
        score: 0.5,
    }
}

fn build_candidate(
    ds: &Dataset,
    feature: usize,
    variant: RuleVariant,
    bins: usize,
    base_min_support: Option<u64>,
    default_label: Label,
) -> Result<Candidate> {
    let col = sorted_column(ds, feature);
    let segments = match variant {
        RuleVariant::Classic => classic_segments(&col, bins)?,
        RuleVariant::ManyRules => many_rules_segments(&col),
    };
    let intervals = intervals_from_segments(&segments, feature);
    let cases = match base_min_support {
        Some(min) => base_cases(&col, min),
        None => Vec::new(),
    };
    let correct = ds
        .samples
        .iter()
        .filter(|s| {
            classify(&cases, &intervals, default_label, s.features[feature]).label == s.label
        })
        .count();
    Ok(Candidate {
        base_cases: cases,
        intervals,
        accuracy: correct as f64 / ds.len() as f64,
    })
}

fn train(
    ds: &Dataset,
    variant: RuleVariant,
    bins: usize,
    base_min_support: Option<u64>,
) -> Result<RuleListModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let default_label = global_majority(ds);
    let mut candidates = Vec::with_capacity(ds.n_features());
    for f in 0..ds.n_features() {
        candidates.push(build_candidate(
            ds,
            f,
            variant,
            bins,
            base_min_support,
            default_label,
        )?);
    }
    let feature_accuracies: Vec<f64> = candidates.iter().map(|c| c.accuracy).collect();
    let chosen = feature_accuracies
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.total_cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .unwrap();
    let winner = candidates.swap_remove(chosen);

    Ok(RuleListModel {
        variant,
        feature_index: chosen,
        n_features: ds.n_features(),
        base_cases: winner.base_cases,
        intervals: winner.intervals,
        default_label,
        train_accuracy: winner.accuracy,
        feature_accuracies,
    })
}

/// Classic OneR: quantile value buckets per feature, majority label per
/// bucket, lowest-training-error feature wins (ties to the lower index).
pub fn train_classic_oner(ds: &Dataset, cfg: &OneRConfig) -> Result<RuleListModel> {
    train(ds, RuleVariant::Classic, cfg.bins, None)
}

/// The many-rules variant: class-repetition cuts yield multiple labeled
/// intervals per feature, plus exact-value base cases for frequent
/// unanimous values; the highest-training-accuracy feature wins.
pub fn train_many_rules(ds: &Dataset, cfg: &ManyRulesConfig) -> Result<RuleListModel> {
    train(
        ds,
        RuleVariant::ManyRules,
        0,
        Some(cfg.base_case_min_support),
    )
}

impl RuleListModel {
    pub fn rule_count(&self) -> usize {
        self.base_cases.len() + self.intervals.len()
    }

    /// Base cases first, then binary search over the intervals; values at
    /// or below the minimum bound fall to the default label at score 0.5.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(classify(
            &self.base_cases,
            &self.intervals,
            self.default_label,
            x[self.feature_index],
        ))
    }

    /// Human-readable rule list: a per-feature accuracy comparison header,
    /// one line per rule in interval order, and the fallback label.
    pub fn explain(&self, feature_names: &[String]) -> String {
        let mut out = String::new();
        for (i, acc) in self.feature_accuracies.iter().enumerate() {
            let marker = if i == self.feature_index {
                " (chosen)"
            } else {
                ""
            };
            out.push_str(&format!(
                "feature {}: train_acc={:.4}{marker}\n",
                feature_names[i], acc
            ));
        }
        let name = &feature_names[self.feature_index];
        for c in &self.base_cases {
            out.push_str(&format!("if {name} == {:?} then {}\n", c.value, c.label));
        }
        for iv in &self.intervals {
            out.push_str(&format!(
                "if {:?} < {name} <= {:?} then {}\n",
                iv.lower, iv.upper, iv.label
            ));
        }
        out.push_str(&format!("default {}\n", self.default_label));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{HpcSample, Provenance};
    use crate::rng::Rng;

    fn dataset(columns: Vec<Vec<f64>>, labels: Vec<u8>) -> Dataset {
        let samples = (0..labels.len())
            .map(|i| HpcSample {
                features: columns.iter().map(|c| c[i]).collect(),
                label: Label::from_u8(labels[i]).unwrap(),
                family: None,
            })
            .collect();
        Dataset {
            samples,
            feature_names: (0..columns.len()).map(|j| format!("f{j}")).collect(),
            provenance: Provenance::Synthetic,
        }
    }

    #[test]
    fn perfect_feature_wins_with_zero_error() {
        let labels = vec![0, 1, 0, 1, 1, 0, 1, 0, 1, 0];
        let copy: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        let mut rng = Rng::new(3);
        let noise: Vec<f64> = (0..10).map(|_| rng.next_f64()).collect();
        let ds = dataset(vec![copy, noise], labels);
        let m = train_classic_oner(&ds, &OneRConfig::default()).unwrap();
        assert_eq!(m.feature_index, 0);
        assert_eq!(m.train_accuracy, 1.0);
    }

    #[test]
    fn unanimous_labels_yield_a_single_rule() {
        let ds = dataset(vec![vec![1.0, 2.0, 3.0, 4.0]], vec![0, 0, 0, 0]);
        let m = train_classic_oner(&ds, &OneRConfig::default()).unwrap();
        assert_eq!(m.intervals.len(), 1);
        assert_eq!(m.intervals[0].label, Label::Benign);
        assert_eq!(m.predict(&[2.5]).unwrap().label, Label::Benign);
        assert!(
            train_classic_oner(&dataset(vec![vec![]], vec![]), &OneRConfig::default()).is_err()
        );
    }

    /// Brute-force oracle for classic OneR: per feature, per bucket,
    /// count the minority; the best feature has the fewest errors.
    fn classic_error_oracle(ds: &Dataset, bins: usize) -> (usize, u64) {
        let mut best = (usize::MAX, u64::MAX);
        for f in 0..ds.n_features() {
            let ids = discretize(&ds.feature_column(f), bins).unwrap();
            let mut per_bucket: std::collections::BTreeMap<usize, (u64, u64)> = Default::default();
            for (s, &b) in ds.samples.iter().zip(&ids) {
                let e = per_bucket.entry(b).or_default();
                if s.label.is_malware() {
                    e.1 += 1;
                } else {
                    e.0 += 1;
                }
            }
            let errors: u64 = per_bucket.values().map(|&(b, m)| b.min(m)).sum();
            if errors < best.1 {
                best = (f, errors);
            }
        }
        best
    }

    #[test]
    fn classic_choice_matches_bucket_error_oracle() {
        let mut rng = Rng::new(77);
        for round in 0..10 {
            let n = 40;
            let labels: Vec<u8> = (0..n).map(|_| rng.next_index(2) as u8).collect();
            let cols: Vec<Vec<f64>> = (0..3)
                .map(|j| {
                    labels
                        .iter()
                        .map(|&l| l as f64 * (j as f64 * 0.4) + rng.next_f64())
                        .collect()
                })
                .collect();
            let ds = dataset(cols, labels);
            let m = train_classic_oner(&ds, &OneRConfig::default()).unwrap();
            let (oracle_f, oracle_err) = classic_error_oracle(&ds, 8);
            assert_eq!(m.feature_index, oracle_f, "round {round}");
            // Interval construction may only lose the minimum-valued
            // samples relative to pure bucket counting.
            let bucket_acc = 1.0 - oracle_err as f64 / n as f64;
            assert!((m.train_accuracy - bucket_acc).abs() <= 2.0 / n as f64);
        }
    }

    fn worked_example() -> Dataset {
        // Eight rows over the cyclesct range with one qualifying class
        // repetition at sorted rows 4-5.
        let cyclesct = vec![
            1_102_456.0,
            1_300_000.0,
            1_500_000.0,
            1_700_000.0,
            1_945_148.0,
            2_500_000.0,
            4_000_000.0,
            5_944_750.0,
        ];
        let labels = vec![0, 1, 0, 0, 0, 1, 1, 1];
        let constant = vec![3.0; 8];
        dataset(
            vec![constant.clone(), constant.clone(), constant, cyclesct],
            labels,
        )
    }

    #[test]
    fn reconstructs_the_two_interval_example() {
        let m = train_many_rules(&worked_example(), &ManyRulesConfig::default()).unwrap();
        assert_eq!(m.feature_index, 3);
        assert_eq!(m.intervals.len(), 2);

        let first = &m.intervals[0];
        assert_eq!(first.lower, 1_102_456.0);
        assert_eq!(first.upper, 1_945_148.0);
        assert_eq!(first.label, Label::Benign);
        assert_eq!(first.support, 5);

        let second = &m.intervals[1];
        assert_eq!(second.lower, 1_945_148.0);
        assert_eq!(second.upper, f64::INFINITY);
        assert_eq!(second.label, Label::Malware);
        assert_eq!(second.support, 3);

        // The boundary value itself stays in the lower interval.
        assert_eq!(
            m.predict(&[3.0, 3.0, 3.0, 1_945_148.0]).unwrap().label,
            Label::Benign
        );
        assert_eq!(
            m.predict(&[3.0, 3.0, 3.0, 1_945_149.0]).unwrap().label,
            Label::Malware
        );
    }

    #[test]
    fn perfectly_ordered_classes_make_two_intervals() {
        let values: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let labels = vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        let ds = dataset(vec![values], labels);
        let m = train_many_rules(&ds, &ManyRulesConfig::default()).unwrap();
        assert_eq!(m.intervals.len(), 2);
        assert_eq!(m.train_accuracy, 1.0);
    }

    /// Independent scan-rule oracle: recompute cut positions by the
    /// stated rule and compare interval bounds and labels.
    fn scan_oracle(values: &[f64], labels: &[Label]) -> Vec<(f64, f64, Label)> {
        let mut col: Vec<(f64, Label)> =
            values.iter().copied().zip(labels.iter().copied()).collect();
        col.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.as_u8().cmp(&b.1.as_u8())));

        // Cut detection.
        let mut cut_after = Vec::new();
        let mut run = 1;
        for i in 0..col.len() - 1 {
            if col[i + 1].1 != col[i].1 && col[i + 1].0 > col[i].0 && run >= 2 {
                cut_after.push(i);
            }
            run = if col[i + 1].1 == col[i].1 { run + 1 } else { 1 };
        }

        // Segment majorities and bounds.
        let mut segs: Vec<(f64, f64, Label)> = Vec::new();
        let mut start = 0;
        for end in cut_after.iter().copied().chain([col.len() - 1]) {
            let slice = &col[start..=end];
            let malware = slice.iter().filter(|(_, l)| l.is_malware()).count();
            let label = if 2 * malware > slice.len() {
                Label::Malware
            } else {
                Label::Benign
            };
            segs.push((slice[0].0, slice[slice.len() - 1].0, label));
            start = end + 1;
        }

        // Interval bounds + same-label merge.
        let min = segs[0].0;
        let mut out: Vec<(f64, f64, Label)> = Vec::new();
        for (i, &(_, last, label)) in segs.iter().enumerate() {
            let lower = if i == 0 { min } else { segs[i - 1].1 };
            let upper = if i + 1 == segs.len() {
                f64::INFINITY
            } else {
                last
            };
            let lower = if lower == upper {
                f64::NEG_INFINITY
            } else {
                lower
            };
            if let Some(prev) = out.last_mut() {
                if prev.2 == label {
                    prev.1 = upper;
                    continue;
                }
            }
            out.push((lower, upper, label));
        }
        out
    }

    #[test]
    fn random_sets_match_the_scan_oracle() {
        let mut rng = Rng::new(501);
        for _ in 0..30 {
            let n = 30;
            let values: Vec<f64> = (0..n).map(|_| (rng.next_index(12) as f64) * 1.5).collect();
            let labels_u8: Vec<u8> = (0..n).map(|_| rng.next_index(2) as u8).collect();
            let labels: Vec<Label> = labels_u8
                .iter()
                .map(|&l| Label::from_u8(l).unwrap())
                .collect();
            let ds = dataset(vec![values.clone()], labels_u8);
            let m = train_many_rules(
                &ds,
                &ManyRulesConfig {
                    base_case_min_support: u64::MAX,
                },
            )
            .unwrap();
            let oracle = scan_oracle(&values, &labels);
            assert_eq!(m.intervals.len(), oracle.len());
            for (iv, &(lo, hi, label)) in m.intervals.iter().zip(&oracle) {
                assert_eq!(iv.lower, lo);
                assert_eq!(iv.upper, hi);
                assert_eq!(iv.label, label);
            }
        }
    }

    #[test]
    fn zero_node_loads_base_case() {
        // Six benign zeros install a base case on node-loads; elevated
        // node-loads values mark malware.
        let node_loads = vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 50.0, 80.0, 120.0, 200.0];
        let labels = vec![0, 0, 0, 0, 0, 0, 1, 1, 1, 1];
        let ds = dataset(vec![node_loads], labels);
        let m = train_many_rules(&ds, &ManyRulesConfig::default()).unwrap();
        assert_eq!(m.base_cases.len(), 1);
        assert_eq!(m.base_cases[0].value, 0.0);
        assert_eq!(m.base_cases[0].label, Label::Benign);
        assert_eq!(m.base_cases[0].support, 6);

        let p = m.predict(&[0.0]).unwrap();
        assert_eq!(p.label, Label::Benign);
        assert_eq!(p.score, 0.0);
        assert_eq!(m.train_accuracy, 1.0);
    }

    #[test]
    fn pure_malware_interval_scores_one() {
        let m = train_many_rules(&worked_example(), &ManyRulesConfig::default()).unwrap();
        let p = m.predict(&[3.0, 3.0, 3.0, 4_500_000.0]).unwrap();
        assert_eq!(p.label, Label::Malware);
        assert_eq!(p.score, 1.0);
    }

    /// Linear-scan prediction oracle.
    fn linear_scan(m: &RuleListModel, v: f64) -> (Label, f64) {
        for c in &m.base_cases {
            if c.value == v {
                return (c.label, if c.label.is_malware() { 1.0 } else { 0.0 });
            }
        }
        for iv in &m.intervals {
            if iv.lower < v && v <= iv.upper {
                let score = if iv.label.is_malware() {
                    iv.purity
                } else {
                    1.0 - iv.purity
                };
                return (iv.label, score);
            }
        }
        (m.default_label, 0.5)
    }

    #[test]
    fn binary_search_matches_linear_scan() {
        let mut rng = Rng::new(313);
        let n = 60;
        let values: Vec<f64> = (0..n).map(|_| (rng.next_index(15) as f64) * 2.0).collect();
        let labels: Vec<u8> = values
            .iter()
            .map(|&v| u8::from(v > 14.0) ^ (rng.next_index(6) == 0) as u8)
            .collect();
        let ds = dataset(vec![values], labels);
        for m in [
            train_many_rules(&ds, &ManyRulesConfig::default()).unwrap(),
            train_classic_oner(&ds, &OneRConfig::default()).unwrap(),
        ] {
            for _ in 0..50 {
                let v = rng.uniform(-5.0, 40.0);
                let p = m.predict(&[v]).unwrap();
                let (label, score) = linear_scan(&m, v);
                assert_eq!(p.label, label);
                assert_eq!(p.score, score);
            }
            assert!(m.predict(&[1.0, 2.0]).is_err());
        }
    }

    fn assert_partition(m: &RuleListModel) {
        // Disjoint, sorted, alternating labels, covering up to +inf.
        for w in m.intervals.windows(2) {
            assert_eq!(w[0].upper, w[1].lower, "adjacent intervals must chain");
            assert!(w[0].label != w[1].label, "adjacent labels must differ");
            assert!(w[0].lower < w[0].upper);
        }
        let last = m.intervals.last().unwrap();
        assert_eq!(last.upper, f64::INFINITY);
        assert!(last.lower < last.upper);
        // Probe around every breakpoint.
        for iv in &m.intervals {
            if iv.lower.is_finite() {
                let eps = (iv.lower.abs() * 1e-9).max(1e-9);
                let hits = |v: f64| {
                    m.intervals
                        .iter()
                        .filter(|i| i.lower < v && v <= i.upper)
                        .count()
                };
                assert_eq!(hits(iv.lower + eps), 1);
                assert!(hits(iv.lower) <= 1);
            }
        }
    }

    #[test]
    fn interval_partition_properties_hold_on_random_data() {
        let mut rng = Rng::new(999);
        for _ in 0..40 {
            let n = 25 + rng.next_index(30);
            let values: Vec<f64> = (0..n).map(|_| rng.next_f64() * 100.0).collect();
            let labels: Vec<u8> = values
                .iter()
                .map(|&v| u8::from(v > 50.0) ^ (rng.next_index(4) == 0) as u8)
                .collect();
            let ds = dataset(vec![values], labels);
            assert_partition(&train_many_rules(&ds, &ManyRulesConfig::default()).unwrap());
            assert_partition(&train_classic_oner(&ds, &OneRConfig::default()).unwrap());
        }
    }

    #[test]
    fn rule_lists_are_invariant_to_row_shuffles() {
        let mut rng = Rng::new(424);
        let n = 50;
        let values: Vec<f64> = (0..n).map(|_| (rng.next_index(10) as f64) * 3.0).collect();
        let labels: Vec<u8> = (0..n).map(|_| rng.next_index(2) as u8).collect();
        let ds = dataset(vec![values.clone()], labels.clone());

        let mut order: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut order);
        let shuffled = dataset(
            vec![order.iter().map(|&i| values[i]).collect()],
            order.iter().map(|&i| labels[i]).collect(),
        );

        let a = train_many_rules(&ds, &ManyRulesConfig::default()).unwrap();
        let b = train_many_rules(&shuffled, &ManyRulesConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn explain_lists_header_rules_and_default() {
        let m = train_many_rules(&worked_example(), &ManyRulesConfig::default()).unwrap();
        let names: Vec<String> = [
            "node-loads",
            "dTLB-stores",
            "branch-instructions",
            "cyclesct",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let text = m.explain(&names);
        assert_eq!(text, m.explain(&names), "explain must be stable");
        let lines: Vec<&str> = text.lines().collect();
        // 4 header lines + 2 rules + default.
        assert_eq!(lines.len(), 7);
        assert!(lines[3].starts_with("feature cyclesct: train_acc="));
        assert!(lines[3].ends_with("(chosen)"));
        assert_eq!(lines[4], "if 1102456.0 < cyclesct <= 1945148.0 then benign");
        assert_eq!(lines[5], "if 1945148.0 < cyclesct <= inf then malware");
        assert_eq!(lines[6], "default benign");
    }

    type ParsedRules = (Vec<(f64, Label)>, Vec<(f64, f64, Label)>, Label);

    /// Parse-and-compare harness: rebuild a classifier from the explain
    /// text and check it classifies every probe identically.
    fn parse_explain(text: &str, names: &[String]) -> ParsedRules {
        let mut cases = Vec::new();
        let mut intervals = Vec::new();
        let mut default = Label::Benign;
        let parse_label = |s: &str| match s {
            "benign" => Label::Benign,
            "malware" => Label::Malware,
            other => panic!("bad class `{other}`"),
        };
        let parse_bound = |s: &str| s.parse::<f64>().unwrap();
        for line in text.lines() {
            if line.starts_with("feature ") {
                continue;
            }
            if let Some(rest) = line.strip_prefix("default ") {
                default = parse_label(rest);
            } else if line.contains(" == ") {
                let toks: Vec<&str> = line.split_whitespace().collect();
                // if <name> == <v> then <class>
                cases.push((parse_bound(toks[3]), parse_label(toks[5])));
            } else {
                let toks: Vec<&str> = line.split_whitespace().collect();
                // if <lo> < <name> <= <hi> then <class>
                assert!(names.contains(&toks[3].to_string()));
                intervals.push((
                    parse_bound(toks[1]),
                    parse_bound(toks[5]),
                    parse_label(toks[7]),
                ));
            }
        }
        (cases, intervals, default)
    }

    #[test]
    fn explain_round_trip_classifies_identically() {
        let node_loads = vec![
            0.0, 0.0, 0.0, 0.0, 0.0, 7.0, 9.0, 50.0, 80.0, 120.0, 200.0, 11.0,
        ];
        let labels = vec![0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let ds = dataset(vec![node_loads], labels);
        let m = train_many_rules(&ds, &ManyRulesConfig::default()).unwrap();
        let names = vec!["node-loads".to_string()];
        let (cases, intervals, default) = parse_explain(&m.explain(&names), &names);

        let mut rng = Rng::new(17);
        for _ in 0..100 {
            let v = rng.uniform(-10.0, 250.0);
            let expected = m.predict(&[v]).unwrap().label;
            let got = cases
                .iter()
                .find(|(cv, _)| *cv == v)
                .map(|&(_, l)| l)
                .or_else(|| {
                    intervals
                        .iter()
                        .find(|&&(lo, hi, _)| lo < v && v <= hi)
                        .map(|&(_, _, l)| l)
                })
                .unwrap_or(default);
            assert_eq!(got, expected);
        }
        // Exact-value probes including the base case.
        for v in [0.0, 7.0, 200.0] {
            let expected = m.predict(&[v]).unwrap().label;
            let got = cases
                .iter()
                .find(|(cv, _)| *cv == v)
                .map(|&(_, l)| l)
                .or_else(|| {
                    intervals
                        .iter()
                        .find(|&&(lo, hi, _)| lo < v && v <= hi)
                        .map(|&(_, _, l)| l)
                })
                .unwrap_or(default);
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn many_rules_beats_classic_on_structured_data() {
        let mut rng = Rng::new(808);
        for _ in 0..50 {
            let n = 60;
            let labels: Vec<u8> = (0..n).map(|_| rng.next_index(2) as u8).collect();
            let values: Vec<f64> = labels
                .iter()
                .map(|&l| l as f64 * 2.0 + rng.next_normal())
                .collect();
            let noise: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let ds = dataset(vec![values, noise], labels);
            let many = train_many_rules(&ds, &ManyRulesConfig::default()).unwrap();
            let classic = train_classic_oner(&ds, &OneRConfig::default()).unwrap();
            assert!(
                many.train_accuracy >= classic.train_accuracy,
                "many {} < classic {}",
                many.train_accuracy,
                classic.train_accuracy
            );
        }
    }

    #[test]
    fn interval_bounds_round_trip_through_json() {
        let m = train_many_rules(&worked_example(), &ManyRulesConfig::default()).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: RuleListModel = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        assert_eq!(back.intervals.last().unwrap().upper, f64::INFINITY);
    }
}
