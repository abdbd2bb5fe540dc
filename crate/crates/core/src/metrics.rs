//! Confusion-matrix metrics, ROC construction, and AUC.
//!
//! Positive means malware. All four counts come from one pass over the
//! prediction/actual pairs; the derived metrics are exact single
//! divisions of integer counts. The ROC curve sweeps every distinct score
//! as a threshold (predict positive when score >= threshold) and AUC is
//! the trapezoidal integral of TPR over FPR.

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
}

/// A metric value plus a flag marking degenerate denominators (the value
/// is then defined as 0 rather than poisoning report tables).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub degenerate: bool,
}

impl MetricValue {
    fn exact(value: f64) -> Self {
        MetricValue {
            value,
            degenerate: false,
        }
    }

    fn degenerate_zero() -> Self {
        MetricValue {
            value: 0.0,
            degenerate: true,
        }
    }
}

/// Tallies the four confusion counts.
pub fn confusion(preds: &[Label], actuals: &[Label]) -> Result<ConfusionMatrix> {
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }
    if preds.len() != actuals.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: actuals.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &a) in preds.iter().zip(actuals) {
        match (p, a) {
            (Label::Malware, Label::Malware) => cm.true_positives += 1,
            (Label::Malware, Label::Benign) => cm.false_positives += 1,
            (Label::Benign, Label::Benign) => cm.true_negatives += 1,
            (Label::Benign, Label::Malware) => cm.false_negatives += 1,
        }
    }
    Ok(cm)
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    /// (TP + TN) / total.
    pub fn accuracy(&self) -> MetricValue {
        if self.total() == 0 {
            return MetricValue::degenerate_zero();
        }
        MetricValue::exact((self.true_positives + self.true_negatives) as f64 / self.total() as f64)
    }

    /// TP / (TP + FP).
    pub fn precision(&self) -> MetricValue {
        let den = self.true_positives + self.false_positives;
        if den == 0 {
            return MetricValue::degenerate_zero();
        }
        MetricValue::exact(self.true_positives as f64 / den as f64)
    }

    /// TP / (TP + FN), also the true positive rate.
    pub fn recall(&self) -> MetricValue {
        let den = self.true_positives + self.false_negatives;
        if den == 0 {
            return MetricValue::degenerate_zero();
        }
        MetricValue::exact(self.true_positives as f64 / den as f64)
    }

    /// FP / (FP + TN), the false positive rate.
    pub fn false_positive_rate(&self) -> MetricValue {
        let den = self.false_positives + self.true_negatives;
        if den == 0 {
            return MetricValue::degenerate_zero();
        }
        MetricValue::exact(self.false_positives as f64 / den as f64)
    }

    /// Harmonic mean of precision and recall. Computed as the single
    /// division 2*TP / (2*TP + FP + FN), which is algebraically equal to
    /// 2*P*R / (P + R) whenever P + R > 0.
    pub fn f1(&self) -> MetricValue {
        if self.precision().value + self.recall().value == 0.0 {
            return MetricValue::degenerate_zero();
        }
        let den = 2 * self.true_positives + self.false_positives + self.false_negatives;
        MetricValue::exact(2.0 * self.true_positives as f64 / den as f64)
    }
}

/// F1 from already-computed precision and recall values: 2*P*R / (P + R).
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        return 0.0;
    }
    2.0 * precision * recall / (precision + recall)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve: one point per distinct threshold, thresholds descending
/// from the +inf sentinel at (0, 0) down to the lowest score at (1, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub thresholds: Vec<f64>,
}

/// Builds the ROC curve by sweeping every distinct score as a threshold,
/// predicting positive when score >= threshold.
pub fn roc_curve(scores: &[f64], actuals: &[Label]) -> Result<RocCurve> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    if scores.len() != actuals.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: actuals.len(),
        });
    }
    let n_pos = actuals.iter().filter(|l| l.is_malware()).count() as f64;
    let n_neg = actuals.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return Err(Error::UndefinedRoc);
    }

    let mut pairs: Vec<(f64, Label)> = scores
        .iter()
        .copied()
        .zip(actuals.iter().copied())
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let mut thresholds = vec![f64::INFINITY];
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut i = 0;
    while i < pairs.len() {
        let t = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == t {
            match pairs[i].1 {
                Label::Malware => tp += 1,
                Label::Benign => fp += 1,
            }
            i += 1;
        }
        thresholds.push(t);
        points.push(RocPoint {
            fpr: fp as f64 / n_neg,
            tpr: tp as f64 / n_pos,
        });
    }
    Ok(RocCurve { points, thresholds })
}

/// Trapezoidal area under the ROC curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// ROC plot data as CSV: `threshold,fpr,tpr`, thresholds descending.
pub fn roc_csv_string(curve: &RocCurve) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for (t, p) in curve.thresholds.iter().zip(&curve.points) {
        out.push_str(&format!("{t},{},{}\n", p.fpr, p.tpr));
    }
    out
}
