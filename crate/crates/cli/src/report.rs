//! The combined experiment: split, select, scale, train every model,
//! evaluate on the zero-day test set, and write the full artifact set.
//! All outputs are deterministic functions of the config, so a rerun
//! reproduces every file byte for byte.

use std::fs;
use std::path::Path;

use hmd_core::cost::{cost_csv_string, estimate_cost, rank_models, CostReport};
use hmd_core::dataset::{apply_scaling, fit_scaling, write_csv, zero_day_split, Dataset, Label};
use hmd_core::error::{Error, Result};
use hmd_core::feature_selection::select_k_best;
use hmd_core::metrics::{auc, confusion, f1_score, roc_csv_string, roc_curve, RocCurve};
use hmd_core::model::ModelType;

use crate::config::ExperimentConfig;
use crate::model_file::{train_by_type, ModelFile};

/// Fixed table order: the seven classifiers, then the classic baseline.
pub const REPORT_ORDER: [ModelType; 8] = [
    ModelType::Knn,
    ModelType::Mlp,
    ModelType::DecisionTree,
    ModelType::BaggedTrees,
    ModelType::Svm,
    ModelType::LogisticRegression,
    ModelType::ManyRulesOneR,
    ModelType::OneR,
];

pub struct ModelRow {
    pub model_type: ModelType,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub auc: f64,
    pub curve: RocCurve,
    pub cost: CostReport,
}

pub struct ReportOutput {
    pub rows: Vec<ModelRow>,
    pub models: Vec<(ModelType, ModelFile)>,
    pub selection_csv: String,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Runs the full experiment in memory.
pub fn run_experiment(cfg: &ExperimentConfig, ds: &Dataset) -> Result<ReportOutput> {
    let split = zero_day_split(ds, &cfg.split)?;

    let selection = select_k_best(&split.train, cfg.selection.k, cfg.selection.bins)?;
    let train_sel = split.train.project(&selection.kept_indices)?;
    let test_sel = split.test.project(&selection.kept_indices)?;

    let mut selection_csv = String::from("feature_name,score_bits\n");
    let mut scored: Vec<_> = selection.all_scores.iter().collect();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.feature_index.cmp(&b.feature_index))
    });
    for s in scored {
        selection_csv.push_str(&format!(
            "{},{}\n",
            split.train.feature_names[s.feature_index], s.score
        ));
    }

    let scaling = fit_scaling(&train_sel)?;
    let train = apply_scaling(&train_sel, &scaling)?;
    let test = apply_scaling(&test_sel, &scaling)?;
    let actuals = test.labels();

    let mut rows = Vec::new();
    let mut models = Vec::new();
    for model_type in REPORT_ORDER {
        let model = train_by_type(model_type, &train, cfg)?;
        let preds = model.predict_dataset(&test)?;
        let labels: Vec<Label> = preds.iter().map(|p| p.label).collect();
        let scores: Vec<f64> = preds.iter().map(|p| p.score).collect();

        let cm = confusion(&labels, &actuals)?;
        let precision = cm.precision().value;
        let recall = cm.recall().value;
        let curve = roc_curve(&scores, &actuals)?;
        rows.push(ModelRow {
            model_type,
            accuracy: cm.accuracy().value,
            precision,
            recall,
            f1: f1_score(precision, recall),
            auc: auc(&curve),
            curve,
            cost: estimate_cost(&model, &cfg.cost_table)?,
        });
        models.push((
            model_type,
            ModelFile::new(model, train.feature_names.clone(), Some(scaling.clone())),
        ));
    }

    Ok(ReportOutput {
        rows,
        models,
        selection_csv,
    })
}

pub fn metrics_csv(rows: &[ModelRow]) -> String {
    let mut out = String::from("model,accuracy,precision,recall,f1,auc\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.model_type, r.accuracy, r.precision, r.recall, r.f1, r.auc
        ));
    }
    out
}

pub fn metrics_table(rows: &[ModelRow]) -> String {
    let mut out = format!(
        "{:<22}{:>10}{:>11}{:>9}{:>9}{:>9}\n",
        "model", "accuracy", "precision", "recall", "f1", "auc"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<22}{:>10.4}{:>11.4}{:>9.4}{:>9.4}{:>9.4}\n",
            r.model_type.to_string(),
            r.accuracy,
            r.precision,
            r.recall,
            r.f1,
            r.auc
        ));
    }
    out
}

fn ranking_table(ranked: &[(String, CostReport)]) -> String {
    let mut out = format!(
        "{:<22}{:>10}{:>14}{:>10}\n",
        "model", "rme", "latency_cyc", "interval"
    );
    for (name, r) in ranked {
        out.push_str(&format!(
            "{:<22}{:>10}{:>14}{:>10}\n",
            name, r.rme, r.latency_cycles, r.interval_cycles
        ));
    }
    out
}

/// Runs the experiment and writes every artifact under `out_dir`.
pub fn run_report(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    let ds = cfg.load_dataset()?;
    let output = run_experiment(cfg, &ds)?;

    fs::create_dir_all(out_dir.join("models")).map_err(|e| Error::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;

    write_csv(&ds, out_dir.join("dataset.csv"))?;
    write_file(&out_dir.join("selection.csv"), &output.selection_csv)?;
    write_file(&out_dir.join("metrics.csv"), &metrics_csv(&output.rows))?;

    for row in &output.rows {
        write_file(
            &out_dir.join(format!("roc_{}.csv", row.model_type)),
            &roc_csv_string(&row.curve),
        )?;
    }

    let named: Vec<(String, CostReport)> = output
        .rows
        .iter()
        .map(|r| (r.model_type.to_string(), r.cost.clone()))
        .collect();
    write_file(&out_dir.join("cost.csv"), &cost_csv_string(&named))?;
    let cost_json = serde_json::to_string_pretty(&named)
        .map_err(|e| Error::Model(format!("cost serialization failed: {e}")))?;
    write_file(&out_dir.join("cost.json"), &(cost_json + "\n"))?;

    let ranked = rank_models(&named);
    let text = format!(
        "{}\nresource ranking (highest overhead first)\n{}",
        metrics_table(&output.rows),
        ranking_table(&ranked)
    );
    write_file(&out_dir.join("report.txt"), &text)?;

    for (model_type, file) in &output.models {
        file.save(&out_dir.join("models").join(format!("{model_type}.json")))?;
    }
    Ok(())
}
