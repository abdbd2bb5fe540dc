//! Mutual-information feature scoring and top-k selection.
//!
//! Continuous counters are first binned by equal-frequency quantiles, then
//! each feature is scored against the class label with a plug-in estimate
//! of mutual information over the empirical joint distribution (log base
//! 2, so scores are in bits). The k highest-scoring features are kept.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Mutual information of one feature with the class label, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature_index: usize,
    pub score: f64,
}

/// Result of top-k selection: kept indices ordered by descending score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub kept_indices: Vec<usize>,
    pub all_scores: Vec<FeatureScore>,
}

/// Plug-in mutual information between two discrete sequences, in bits.
/// Joint cells with zero probability contribute nothing.
pub fn mutual_information(x: &[usize], y: &[usize]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let nx = x.iter().max().unwrap() + 1;
    let ny = y.iter().max().unwrap() + 1;
    let mut joint = vec![0u64; nx * ny];
    let mut px = vec![0u64; nx];
    let mut py = vec![0u64; ny];
    for (&a, &b) in x.iter().zip(y) {
        joint[a * ny + b] += 1;
        px[a] += 1;
        py[b] += 1;
    }
    let n = x.len() as f64;
    let mut mi = 0.0;
    for a in 0..nx {
        for b in 0..ny {
            let c = joint[a * ny + b];
            if c == 0 {
                continue;
            }
            let p_ab = c as f64 / n;
            let p_a = px[a] as f64 / n;
            let p_b = py[b] as f64 / n;
            mi += p_ab * (p_ab / (p_a * p_b)).log2();
        }
    }
    // Rounding can leave a tiny negative residue on independent inputs.
    Ok(mi.max(0.0))
}

/// Equal-frequency (quantile) binning into `bins` buckets. Bin ids lie in
/// [0, bins). Samples with identical values always share a bin: a run of
/// equal values takes the bin of its lowest rank.
pub fn discretize(values: &[f64], bins: usize) -> Result<Vec<usize>> {
    if bins == 0 {
        return Err(Error::Config("bins must be >= 1".into()));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));

    let mut ids = vec![0usize; n];
    let mut run_start_rank = 0;
    for (rank, &idx) in order.iter().enumerate() {
        if rank > 0 && values[idx] != values[order[rank - 1]] {
            run_start_rank = rank;
        }
        ids[idx] = run_start_rank * bins / n;
    }
    Ok(ids)
}

/// Ranks feature indices by descending score; ties go to the lower index.
pub fn top_k_indices(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Discretizes every feature, scores it against the label, and keeps the
/// k best. `kept_indices` come out in descending score order.
pub fn select_k_best(ds: &Dataset, k: usize, bins: usize) -> Result<SelectionResult> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if k == 0 || k > ds.n_features() {
        return Err(Error::Config(format!(
            "k must lie in 1..={}, got {k}",
            ds.n_features()
        )));
    }
    let labels: Vec<usize> = ds
        .samples
        .iter()
        .map(|s| s.label.as_u8() as usize)
        .collect();
    let mut all_scores = Vec::with_capacity(ds.n_features());
    for j in 0..ds.n_features() {
        let binned = discretize(&ds.feature_column(j), bins)?;
        all_scores.push(FeatureScore {
            feature_index: j,
            score: mutual_information(&binned, &labels)?,
        });
    }
    let scores: Vec<f64> = all_scores.iter().map(|s| s.score).collect();
    Ok(SelectionResult {
        kept_indices: top_k_indices(&scores, k),
        all_scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Dataset, HpcSample, Label, Provenance};
    use crate::rng::Rng;

    #[test]
    fn identical_fair_bits_carry_one_bit() {
        let x = vec![0, 1, 0, 1, 0, 1, 0, 1];
        let mi = mutual_information(&x, &x).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_target_carries_nothing() {
        let x = vec![0, 1, 2, 0, 1, 2];
        let y = vec![0; 6];
        assert_eq!(mutual_information(&x, &y).unwrap(), 0.0);
    }

    // Independent oracle: direct term-by-term evaluation of the pmf sum
    // over explicit joint counts.
    fn mi_oracle(joint: &[(usize, usize, u64)]) -> f64 {
        let n: u64 = joint.iter().map(|&(_, _, c)| c).sum();
        let nf = n as f64;
        let mut px = std::collections::HashMap::new();
        let mut py = std::collections::HashMap::new();
        for &(a, b, c) in joint {
            *px.entry(a).or_insert(0u64) += c;
            *py.entry(b).or_insert(0u64) += c;
        }
        joint
            .iter()
            .filter(|&&(_, _, c)| c > 0)
            .map(|&(a, b, c)| {
                let p = c as f64 / nf;
                p * (p / ((px[&a] as f64 / nf) * (py[&b] as f64 / nf))).log2()
            })
            .sum()
    }

    #[test]
    fn matches_term_by_term_oracle_on_skewed_joint() {
        // Joint counts {(0,0):4, (0,1):1, (1,0):1, (1,1):4} over 10 samples.
        let mut x = Vec::new();
        let mut y = Vec::new();
        for (a, b, c) in [(0, 0, 4), (0, 1, 1), (1, 0, 1), (1, 1, 4)] {
            for _ in 0..c {
                x.push(a);
                y.push(b);
            }
        }
        let mi = mutual_information(&x, &y).unwrap();
        let expected = mi_oracle(&[(0, 0, 4), (0, 1, 1), (1, 0, 1), (1, 1, 4)]);
        assert!((mi - expected).abs() < 1e-12);
        // Frozen value of the oracle sum: 0.8*log2(1.6) + 0.2*log2(0.4).
        assert!((mi - 0.278071905112638).abs() < 1e-12, "mi = {mi}");
    }

    #[test]
    fn mi_is_symmetric() {
        let mut rng = Rng::new(99);
        for _ in 0..20 {
            let x: Vec<usize> = (0..60).map(|_| rng.next_index(4)).collect();
            let y: Vec<usize> = (0..60).map(|_| rng.next_index(3)).collect();
            let a = mutual_information(&x, &y).unwrap();
            let b = mutual_information(&y, &x).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn entropy(seq: &[usize]) -> f64 {
        let mut counts = std::collections::HashMap::new();
        for &v in seq {
            *counts.entry(v).or_insert(0u64) += 1;
        }
        let n = seq.len() as f64;
        counts
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum()
    }

    #[test]
    fn mi_is_bounded_by_marginal_entropies() {
        let mut rng = Rng::new(123);
        for _ in 0..30 {
            let x: Vec<usize> = (0..50).map(|_| rng.next_index(5)).collect();
            let y: Vec<usize> = (0..50).map(|_| rng.next_index(2)).collect();
            let mi = mutual_information(&x, &y).unwrap();
            assert!(mi >= 0.0);
            assert!(mi <= entropy(&x).min(entropy(&y)) + 1e-12);
        }
    }

    #[test]
    fn mi_rejects_bad_input() {
        assert!(mutual_information(&[], &[]).is_err());
        assert!(mutual_information(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn discretize_median_split() {
        assert_eq!(
            discretize(&[1.0, 2.0, 3.0, 4.0], 2).unwrap(),
            vec![0, 0, 1, 1]
        );
    }

    #[test]
    fn discretize_single_bin_is_all_zero() {
        assert_eq!(discretize(&[5.0, 1.0, 9.0], 1).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn discretize_never_separates_equal_values() {
        let ids = discretize(&[5.0, 5.0, 5.0, 5.0], 2).unwrap();
        assert!(ids.iter().all(|&b| b == ids[0]));
    }

    #[test]
    fn discretize_ids_stay_in_range() {
        let mut rng = Rng::new(17);
        let values: Vec<f64> = (0..101).map(|_| rng.next_f64()).collect();
        for bins in [1, 2, 3, 7, 16] {
            let ids = discretize(&values, bins).unwrap();
            assert!(ids.iter().all(|&b| b < bins));
        }
        assert!(discretize(&[], 4).is_err());
        assert!(discretize(&[1.0], 0).is_err());
    }

    #[test]
    fn top_k_orders_by_score_with_index_ties() {
        let scores = [0.5, 0.1, 0.9, 0.3, 0.7];
        assert_eq!(top_k_indices(&scores, 4), vec![2, 4, 0, 3]);
        assert_eq!(top_k_indices(&scores, 5), vec![2, 4, 0, 3, 1]);
        assert_eq!(top_k_indices(&[0.2, 0.2, 0.2], 2), vec![0, 1]);
    }

    fn dataset_from_columns(cols: Vec<Vec<f64>>, labels: Vec<Label>) -> Dataset {
        let n = labels.len();
        let samples = (0..n)
            .map(|i| HpcSample {
                features: cols.iter().map(|c| c[i]).collect(),
                label: labels[i],
                family: None,
            })
            .collect();
        Dataset {
            samples,
            feature_names: (0..cols.len()).map(|j| format!("f{j}")).collect(),
            provenance: Provenance::Synthetic,
        }
    }

    fn label_tracking_dataset(seed: u64) -> Dataset {
        let mut rng = Rng::new(seed);
        let labels: Vec<Label> = (0..200)
            .map(|_| {
                if rng.next_f64() < 0.5 {
                    Label::Malware
                } else {
                    Label::Benign
                }
            })
            .collect();
        // Feature 0 tracks the label exactly; features 1-3 are noise.
        let f0: Vec<f64> = labels.iter().map(|l| l.as_u8() as f64).collect();
        let noise: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..200).map(|_| rng.next_f64()).collect())
            .collect();
        let mut cols = vec![f0];
        cols.extend(noise);
        dataset_from_columns(cols, labels)
    }

    #[test]
    fn label_copy_feature_ranks_first() {
        let ds = label_tracking_dataset(7);
        let sel = select_k_best(&ds, 4, 16).unwrap();
        assert_eq!(sel.kept_indices[0], 0);
        assert_eq!(sel.kept_indices.len(), 4);
        assert!(sel.all_scores[0].score > sel.all_scores[1].score);
    }

    #[test]
    fn k_equal_to_feature_count_keeps_everything_in_score_order() {
        let ds = label_tracking_dataset(8);
        let sel = select_k_best(&ds, 4, 16).unwrap();
        let mut sorted = sel.kept_indices.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
        for w in sel.kept_indices.windows(2) {
            assert!(sel.all_scores[w[0]].score >= sel.all_scores[w[1]].score);
        }
        assert!(select_k_best(&ds, 5, 16).is_err());
        assert!(select_k_best(&ds, 0, 16).is_err());
    }

    #[test]
    fn selection_is_invariant_to_monotone_transforms() {
        let ds = label_tracking_dataset(9);
        let transformed = Dataset {
            samples: ds
                .samples
                .iter()
                .map(|s| HpcSample {
                    features: s.features.iter().map(|&v| (v * 3.0 + 1.0).exp()).collect(),
                    label: s.label,
                    family: s.family,
                })
                .collect(),
            feature_names: ds.feature_names.clone(),
            provenance: ds.provenance,
        };
        let a = select_k_best(&ds, 4, 8).unwrap();
        let b = select_k_best(&transformed, 4, 8).unwrap();
        assert_eq!(a.kept_indices, b.kept_indices);
        for (sa, sb) in a.all_scores.iter().zip(&b.all_scores) {
            assert!((sa.score - sb.score).abs() < 1e-12);
        }
    }

    #[test]
    fn scores_are_invariant_to_joint_permutation() {
        let ds = label_tracking_dataset(10);
        let mut order: Vec<usize> = (0..ds.len()).collect();
        Rng::new(4).shuffle(&mut order);
        let permuted = Dataset {
            samples: order.iter().map(|&i| ds.samples[i].clone()).collect(),
            feature_names: ds.feature_names.clone(),
            provenance: ds.provenance,
        };
        let a = select_k_best(&ds, 4, 8).unwrap();
        let b = select_k_best(&permuted, 4, 8).unwrap();
        for (sa, sb) in a.all_scores.iter().zip(&b.all_scores) {
            assert!((sa.score - sb.score).abs() < 1e-12);
        }
    }
}
