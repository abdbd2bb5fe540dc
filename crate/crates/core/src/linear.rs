//! Linear classifiers sharing the scorer w.x + b: a soft-margin SVM
//! trained by subgradient descent on L2-regularized hinge loss, and
//! logistic regression trained by gradient descent on cross-entropy.
//!
//! Both predict malware when w.x + b >= 0 and report sigmoid(w.x + b) as
//! the score; the sigmoid is monotone in the margin, so ROC rankings are
//! unchanged by the calibration.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::model::Prediction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinearKind {
    Svm,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub kind: LinearKind,
    /// Per-epoch training objective checkpoints (regularizer plus mean
    /// hinge for the SVM, mean cross-entropy for logistic regression).
    pub loss_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Inverse regularization strength: lambda = 1 / (c * n).
    pub c: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            c: 1.0,
            learning_rate: 0.1,
            epochs: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            learning_rate: 0.1,
            epochs: 2000,
            seed: 0,
        }
    }
}

/// Numerically stable 1 / (1 + e^-z).
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn margin(weights: &[f64], bias: f64, x: &[f64]) -> f64 {
    weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + bias
}

fn check_trainable(ds: &Dataset) -> Result<()> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !ds.has_both_classes() {
        return Err(Error::SingleClass(
            "linear training needs both classes".into(),
        ));
    }
    Ok(())
}

fn check_hp(learning_rate: f64, label: &str) -> Result<()> {
    if !learning_rate.is_finite() || learning_rate < 0.0 {
        return Err(Error::Config(format!(
            "{label} learning rate must be finite and >= 0, got {learning_rate}"
        )));
    }
    Ok(())
}

impl LinearModel {
    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    /// w.x + b.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: x.len(),
            });
        }
        Ok(margin(&self.weights, self.bias, x))
    }

    /// Malware when w.x + b >= 0; score = sigmoid(w.x + b).
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let z = self.decision_value(x)?;
        let score = sigmoid(z);
        let label = if score >= 0.5 {
            Label::Malware
        } else {
            Label::Benign
        };
        Ok(Prediction { label, score })
    }

    /// Margin band half-width, reported as 1/||w||. The full separation
    /// band between the +-1 constraint lines is twice this value.
    pub fn hyperplane_width(&self) -> Option<f64> {
        let norm = self.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        (norm > 0.0).then(|| 1.0 / norm)
    }
}

/// Full-batch gradient descent on mean binary cross-entropy of
/// sigmoid(w.x + b) against {0, 1} labels, from zero initialization.
pub fn logreg_train(ds: &Dataset, cfg: &LogRegConfig) -> Result<LinearModel> {
    check_trainable(ds)?;
    check_hp(cfg.learning_rate, "logistic")?;
    let n = ds.len() as f64;
    let d = ds.n_features();
    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    let mut loss_history = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        let mut grad_w = vec![0.0; d];
        let mut grad_b = 0.0;
        let mut loss = 0.0;
        for s in &ds.samples {
            let p = sigmoid(margin(&weights, bias, &s.features));
            let y = f64::from(s.label.as_u8());
            let err = p - y;
            for (g, v) in grad_w.iter_mut().zip(&s.features) {
                *g += err * v;
            }
            grad_b += err;
            loss -= y * p.max(1e-300).ln() + (1.0 - y) * (1.0 - p).max(1e-300).ln();
        }
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= cfg.learning_rate * g / n;
        }
        bias -= cfg.learning_rate * grad_b / n;
        loss_history.push(loss / n);
    }

    Ok(LinearModel {
        weights,
        bias,
        kind: LinearKind::Logistic,
        loss_history,
    })
}

fn svm_objective(ds: &Dataset, weights: &[f64], bias: f64, lambda: f64) -> f64 {
    let n = ds.len() as f64;
    let hinge_sum: f64 = ds
        .samples
        .iter()
        .map(|s| (1.0 - s.label.target_pm1() * margin(weights, bias, &s.features)).max(0.0))
        .sum();
    0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>() + hinge_sum / n
}

/// Full-batch subgradient descent on
/// J(w, b) = lambda/2 ||w||^2 + (1/n) sum max(0, 1 - y(w.x + b)),
/// with lambda = 1/(c*n), labels mapped to -1/+1 and zero initialization.
/// The base step lr / (1 + lr * lambda * t) decays over epochs; a step
/// that would raise the objective is halved until it does not, so the
/// post-epoch checkpoints in `loss_history` are non-increasing.
pub fn svm_train(ds: &Dataset, cfg: &SvmConfig) -> Result<LinearModel> {
    check_trainable(ds)?;
    check_hp(cfg.learning_rate, "svm")?;
    if !cfg.c.is_finite() || cfg.c <= 0.0 {
        return Err(Error::Config(format!("c must be positive, got {}", cfg.c)));
    }
    let n = ds.len() as f64;
    let d = ds.n_features();
    let lambda = 1.0 / (cfg.c * n);
    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    let mut current = svm_objective(ds, &weights, bias, lambda);
    let mut loss_history = Vec::with_capacity(cfg.epochs);

    for t in 0..cfg.epochs {
        let mut grad_w: Vec<f64> = weights.iter().map(|w| lambda * w).collect();
        let mut grad_b = 0.0;
        for s in &ds.samples {
            let y = s.label.target_pm1();
            if 1.0 - y * margin(&weights, bias, &s.features) > 0.0 {
                for (g, v) in grad_w.iter_mut().zip(&s.features) {
                    *g -= y * v / n;
                }
                grad_b -= y / n;
            }
        }

        let mut step = cfg.learning_rate / (1.0 + cfg.learning_rate * lambda * t as f64);
        for _ in 0..48 {
            let cand_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let cand_b = bias - step * grad_b;
            let cand_obj = svm_objective(ds, &cand_w, cand_b, lambda);
            if cand_obj <= current {
                weights = cand_w;
                bias = cand_b;
                current = cand_obj;
                break;
            }
            step /= 2.0;
        }
        loss_history.push(current);
    }

    Ok(LinearModel {
        weights,
        bias,
        kind: LinearKind::Svm,
        loss_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{HpcSample, Provenance};
    use crate::rng::Rng;

    #[test]
    fn sigmoid_midpoint_and_asymptotes() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(1000.0) - 1.0).abs() < 1e-12);
        assert!(sigmoid(-1000.0) < 1e-12);
        let mut rng = Rng::new(1);
        for _ in 0..10 {
            let z = rng.uniform(-50.0, 50.0);
            assert!((sigmoid(-z) - (1.0 - sigmoid(z))).abs() < 1e-12);
        }
    }

    fn clusters(n_per_class: usize, seed: u64, gap: f64) -> Dataset {
        let mut rng = Rng::new(seed);
        let mut samples = Vec::new();
        for label in [Label::Benign, Label::Malware] {
            let center = if label.is_malware() { gap } else { -gap };
            for _ in 0..n_per_class {
                samples.push(HpcSample {
                    features: (0..4).map(|_| center + 0.3 * rng.next_normal()).collect(),
                    label,
                    family: None,
                });
            }
        }
        Dataset {
            samples,
            feature_names: (0..4).map(|j| format!("f{j}")).collect(),
            provenance: Provenance::Synthetic,
        }
    }

    fn training_accuracy(m: &LinearModel, ds: &Dataset) -> f64 {
        let correct = ds
            .samples
            .iter()
            .filter(|s| m.predict(&s.features).unwrap().label == s.label)
            .count();
        correct as f64 / ds.len() as f64
    }

    #[test]
    fn logreg_separates_clusters() {
        let ds = clusters(20, 7, 2.0);
        let m = logreg_train(&ds, &LogRegConfig::default()).unwrap();
        assert_eq!(training_accuracy(&m, &ds), 1.0);
    }

    #[test]
    fn zero_epochs_leaves_zero_weights() {
        let ds = clusters(5, 3, 2.0);
        let m = logreg_train(
            &ds,
            &LogRegConfig {
                epochs: 0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.weights.iter().all(|&w| w == 0.0));
        assert_eq!(m.bias, 0.0);
        let p = m.predict(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(p.score, 0.5);
        assert_eq!(p.label, Label::Malware); // sigma(0) >= 0.5 predicts 1
    }

    #[test]
    fn constant_positive_bias_predicts_malware() {
        let m = LinearModel {
            weights: vec![0.0; 4],
            bias: 10.0,
            kind: LinearKind::Logistic,
            loss_history: vec![],
        };
        let p = m.predict(&[0.5; 4]).unwrap();
        assert_eq!(p.label, Label::Malware);
        assert!(p.score > 0.9999);
    }

    #[test]
    fn threshold_identity_holds_on_probes() {
        let ds = clusters(15, 11, 1.5);
        let m = logreg_train(&ds, &LogRegConfig::default()).unwrap();
        let mut rng = Rng::new(12);
        for _ in 0..20 {
            let x: Vec<f64> = (0..4).map(|_| rng.uniform(-3.0, 3.0)).collect();
            let z = m.decision_value(&x).unwrap();
            let p = m.predict(&x).unwrap();
            // Independent scalar evaluation of the score and rule.
            let expected = 1.0 / (1.0 + (-z).exp());
            assert!((p.score - expected).abs() < 1e-12);
            assert_eq!(p.label.is_malware(), z >= 0.0);
            assert_eq!(p.label.is_malware(), p.score >= 0.5);
        }
    }

    #[test]
    fn svm_separates_clusters_with_unit_margins() {
        let ds = clusters(20, 17, 2.0);
        let cfg = SvmConfig {
            c: 100.0,
            learning_rate: 0.05,
            epochs: 5000,
            seed: 0,
        };
        let m = svm_train(&ds, &cfg).unwrap();
        assert_eq!(training_accuracy(&m, &ds), 1.0);
        for s in &ds.samples {
            let fm = s.label.target_pm1() * m.decision_value(&s.features).unwrap();
            assert!(fm >= 1.0 - 1e-3, "functional margin {fm}");
        }
    }

    #[test]
    fn width_is_inverse_weight_norm() {
        let m = LinearModel {
            weights: vec![3.0, 4.0, 0.0, 0.0],
            bias: 1.0,
            kind: LinearKind::Svm,
            loss_history: vec![],
        };
        assert!((m.hyperplane_width().unwrap() - 0.2).abs() < 1e-15);

        let zero = LinearModel {
            weights: vec![0.0; 4],
            bias: 0.0,
            kind: LinearKind::Svm,
            loss_history: vec![],
        };
        assert!(zero.hyperplane_width().is_none());
    }

    #[test]
    fn joint_scaling_preserves_labels_and_halves_width() {
        let ds = clusters(10, 19, 2.0);
        let m = svm_train(&ds, &SvmConfig::default()).unwrap();
        let doubled = LinearModel {
            weights: m.weights.iter().map(|w| 2.0 * w).collect(),
            bias: 2.0 * m.bias,
            kind: LinearKind::Svm,
            loss_history: vec![],
        };
        let mut rng = Rng::new(20);
        for _ in 0..20 {
            let x: Vec<f64> = (0..4).map(|_| rng.uniform(-3.0, 3.0)).collect();
            assert_eq!(
                m.predict(&x).unwrap().label,
                doubled.predict(&x).unwrap().label
            );
        }
        let w1 = m.hyperplane_width().unwrap();
        let w2 = doubled.hyperplane_width().unwrap();
        assert!((w2 - w1 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn on_plane_point_scores_half_and_far_point_saturates() {
        let m = LinearModel {
            weights: vec![1.0, -1.0],
            bias: 0.0,
            kind: LinearKind::Svm,
            loss_history: vec![],
        };
        let p = m.predict(&[0.7, 0.7]).unwrap();
        assert_eq!(p.score, 0.5);
        assert_eq!(p.label, Label::Malware);
        assert!(m.predict(&[100.0, 0.0]).unwrap().score > 0.9999);

        let mut rng = Rng::new(21);
        for _ in 0..20 {
            let x: Vec<f64> = (0..2).map(|_| rng.uniform(-5.0, 5.0)).collect();
            let sign = m.decision_value(&x).unwrap() >= 0.0;
            assert_eq!(m.predict(&x).unwrap().label.is_malware(), sign);
        }
    }

    #[test]
    fn svm_objective_checkpoints_never_increase() {
        let ds = clusters(15, 23, 1.0);
        let m = svm_train(&ds, &SvmConfig::default()).unwrap();
        assert_eq!(m.loss_history.len(), 2000);
        for w in m.loss_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn trainers_are_pure_functions_of_their_inputs() {
        let ds = clusters(12, 29, 1.5);
        let a = svm_train(&ds, &SvmConfig::default()).unwrap();
        let b = svm_train(&ds, &SvmConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = logreg_train(&ds, &LogRegConfig::default()).unwrap();
        let d = logreg_train(&ds, &LogRegConfig::default()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn single_class_training_is_degenerate() {
        let ds = Dataset {
            samples: (0..5)
                .map(|i| HpcSample {
                    features: vec![i as f64; 4],
                    label: Label::Benign,
                    family: None,
                })
                .collect(),
            feature_names: (0..4).map(|j| format!("f{j}")).collect(),
            provenance: Provenance::Synthetic,
        };
        assert!(matches!(
            logreg_train(&ds, &LogRegConfig::default()),
            Err(Error::SingleClass(_))
        ));
        assert!(matches!(
            svm_train(&ds, &SvmConfig::default()),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let ds = clusters(5, 31, 2.0);
        let m = logreg_train(&ds, &LogRegConfig::default()).unwrap();
        assert!(m.predict(&[1.0; 5]).is_err());
    }
}
