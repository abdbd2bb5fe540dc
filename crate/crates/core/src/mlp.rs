//! Feed-forward network with one tanh hidden layer and a tanh output,
//! trained by online backpropagation on squared error.
//!
//! The default topology is 4-5-1: four inputs, five hidden units, one
//! output. Labels map to targets -1 (benign) and +1 (malware); the raw
//! output in (-1, 1) maps to the reported score via (out + 1) / 2.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::dataset::{Dataset, HpcSample, Label, Provenance};
use crate::error::{Error, Result};
use crate::model::Prediction;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Training stops early once the post-epoch RMSE drops below this.
    pub target_rmse: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 5,
            learning_rate: 0.01,
            max_epochs: 100,
            target_rmse: 0.05,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub input_dim: usize,
    pub hidden_dim: usize,
    /// hidden_dim rows of input_dim weights.
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    /// RMSE over the training set after the final epoch.
    pub train_rmse: f64,
}

/// Gradients of the per-sample squared error, shaped like the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

/// sqrt of the mean squared difference.
pub fn rmse(preds: &[f64], actuals: &[f64]) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }
    if preds.len() != actuals.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: actuals.len(),
        });
    }
    let mse = preds
        .iter()
        .zip(actuals)
        .map(|(p, a)| (p - a) * (p - a))
        .sum::<f64>()
        / preds.len() as f64;
    Ok(mse.sqrt())
}

impl MlpModel {
    fn new_random(input_dim: usize, hidden_dim: usize, rng: &mut Rng) -> MlpModel {
        let mut uniform = |_| rng.uniform(-0.5, 0.5);
        MlpModel {
            input_dim,
            hidden_dim,
            hidden_weights: (0..hidden_dim)
                .map(|_| (0..input_dim).map(&mut uniform).collect())
                .collect(),
            hidden_bias: (0..hidden_dim).map(&mut uniform).collect(),
            output_weights: (0..hidden_dim).map(&mut uniform).collect(),
            output_bias: uniform(0),
            train_rmse: f64::NAN,
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite input to mlp forward pass".into()));
        }
        Ok(())
    }

    fn hidden_activations(&self, x: &[f64]) -> Vec<f64> {
        self.hidden_weights
            .iter()
            .zip(&self.hidden_bias)
            .map(|(row, b)| {
                let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b;
                z.tanh()
            })
            .collect()
    }

    /// Raw network output in (-1, 1).
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let hidden = self.hidden_activations(x);
        let z: f64 = self
            .output_weights
            .iter()
            .zip(&hidden)
            .map(|(w, h)| w * h)
            .sum::<f64>()
            + self.output_bias;
        Ok(z.tanh())
    }

    /// Label from the calibrated score (out + 1) / 2 at threshold 0.5.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let out = self.forward(x)?;
        let score = (out + 1.0) / 2.0;
        let label = if score >= 0.5 {
            Label::Malware
        } else {
            Label::Benign
        };
        Ok(Prediction { label, score })
    }

    /// Squared error of one sample against its +-1 target.
    pub fn loss(&self, x: &[f64], target: f64) -> Result<f64> {
        let out = self.forward(x)?;
        Ok((out - target) * (out - target))
    }

    /// Analytic backpropagation gradients of `loss` at one sample.
    pub fn gradients(&self, x: &[f64], target: f64) -> Result<MlpGradients> {
        self.check_input(x)?;
        let hidden = self.hidden_activations(x);
        let z: f64 = self
            .output_weights
            .iter()
            .zip(&hidden)
            .map(|(w, h)| w * h)
            .sum::<f64>()
            + self.output_bias;
        let out = z.tanh();

        let delta_out = 2.0 * (out - target) * (1.0 - out * out);
        let output_weights: Vec<f64> = hidden.iter().map(|h| delta_out * h).collect();
        let delta_hidden: Vec<f64> = self
            .output_weights
            .iter()
            .zip(&hidden)
            .map(|(w, h)| delta_out * w * (1.0 - h * h))
            .collect();
        let hidden_weights = delta_hidden
            .iter()
            .map(|d| x.iter().map(|v| d * v).collect())
            .collect();

        Ok(MlpGradients {
            hidden_weights,
            hidden_bias: delta_hidden,
            output_weights,
            output_bias: delta_out,
        })
    }

    fn apply_gradients(&mut self, g: &MlpGradients, lr: f64) {
        for (row, grow) in self.hidden_weights.iter_mut().zip(&g.hidden_weights) {
            for (w, gw) in row.iter_mut().zip(grow) {
                *w -= lr * gw;
            }
        }
        for (b, gb) in self.hidden_bias.iter_mut().zip(&g.hidden_bias) {
            *b -= lr * gb;
        }
        for (w, gw) in self.output_weights.iter_mut().zip(&g.output_weights) {
            *w -= lr * gw;
        }
        self.output_bias -= lr * g.output_bias;
    }

    fn dataset_rmse(&self, ds: &Dataset) -> Result<f64> {
        let outs = ds
            .samples
            .iter()
            .map(|s| self.forward(&s.features))
            .collect::<Result<Vec<f64>>>()?;
        let targets: Vec<f64> = ds.samples.iter().map(|s| s.label.target_pm1()).collect();
        rmse(&outs, &targets)
    }
}

/// Online gradient descent over shuffled epochs. Deterministic for a
/// fixed (dataset, config) pair.
pub fn train_mlp(ds: &Dataset, cfg: &MlpConfig) -> Result<MlpModel> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cfg.hidden == 0 {
        return Err(Error::Config("mlp needs at least one hidden unit".into()));
    }
    if !cfg.learning_rate.is_finite() || cfg.learning_rate < 0.0 {
        return Err(Error::Config(format!(
            "learning rate must be finite and >= 0, got {}",
            cfg.learning_rate
        )));
    }

    let mut rng = Rng::new(cfg.seed);
    let mut model = MlpModel::new_random(ds.n_features(), cfg.hidden, &mut rng);
    let mut order: Vec<usize> = (0..ds.len()).collect();

    model.train_rmse = model.dataset_rmse(ds)?;
    for _ in 0..cfg.max_epochs {
        rng.shuffle(&mut order);
        for &i in &order {
            let s = &ds.samples[i];
            let g = model.gradients(&s.features, s.label.target_pm1())?;
            model.apply_gradients(&g, cfg.learning_rate);
        }
        model.train_rmse = model.dataset_rmse(ds)?;
        if model.train_rmse < cfg.target_rmse {
            break;
        }
    }
    Ok(model)
}

/// Contents of the MLP data text file: a topology line followed by one
/// sample per line (features then a 0/1 target, whitespace separated).
#[derive(Debug, Clone, PartialEq)]
pub struct MlpDataFile {
    pub topology: (usize, usize, usize),
    pub dataset: Dataset,
}

pub fn read_data_file(path: impl AsRef<Path>) -> Result<MlpDataFile> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_data_reader(BufReader::new(file))
}

pub fn read_data_reader(reader: impl Read) -> Result<MlpDataFile> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();

    let topology_line = match lines.next() {
        Some((_, Ok(line))) => line,
        Some((_, Err(e))) => {
            return Err(Error::Parse {
                line: 1,
                message: e.to_string(),
            })
        }
        None => return Err(Error::EmptyDataset),
    };
    let parts: Vec<usize> = topology_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line: 1,
            message: format!("topology line must be three integers, got `{topology_line}`"),
        })?;
    if parts.len() != 3 || parts[2] != 1 || parts[0] == 0 || parts[1] == 0 {
        return Err(Error::Parse {
            line: 1,
            message: format!("unsupported topology `{topology_line}` (want `<in> <hidden> 1`)"),
        });
    }
    let topology = (parts[0], parts[1], parts[2]);

    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != topology.0 + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} values, found {}", topology.0 + 1, fields.len()),
            });
        }
        let features = fields[..topology.0]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| Error::Parse {
                line: line_no,
                message: "non-numeric feature value".into(),
            })?;
        let label = match *fields.last().unwrap() {
            "0" => Label::Benign,
            "1" => Label::Malware,
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("target must be 0 or 1, got `{other}`"),
                })
            }
        };
        samples.push(HpcSample {
            features,
            label,
            family: None,
        });
    }
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }

    Ok(MlpDataFile {
        topology,
        dataset: Dataset {
            samples,
            feature_names: (0..topology.0).map(|j| format!("f{j}")).collect(),
            provenance: Provenance::Ingested,
        },
    })
}

pub fn write_data_file(
    topology: (usize, usize, usize),
    ds: &Dataset,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("{} {} {}\n", topology.0, topology.1, topology.2);
    for s in &ds.samples {
        let feats: Vec<String> = s.features.iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("{} {}\n", feats.join(" "), s.label.as_u8()));
    }
    let mut file = File::create(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    file.write_all(out.as_bytes()).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}
