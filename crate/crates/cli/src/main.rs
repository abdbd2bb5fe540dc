mod config;
mod model_file;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hmd_core::cost::{cost_csv_string, estimate_cost, rank_models, CostReport};
use hmd_core::dataset::{parse_csv, write_csv};
use hmd_core::error::{Error, Result};
use hmd_core::feature_selection::select_k_best;
use hmd_core::metrics::{auc, confusion, f1_score, roc_csv_string, roc_curve};
use hmd_core::model::{ModelType, TrainedModel};

use config::{DatasetSource, ExperimentConfig};
use model_file::{train_by_type, ModelFile};

#[derive(Parser)]
#[command(
    name = "hmd",
    version,
    about = "Hardware-performance-counter malware detection: generate data, train classifiers, evaluate, explain, and estimate hardware cost"
)]
struct Cli {
    /// Experiment config JSON (defaults describe the synthetic benchmark)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed; reseeds every randomized stage
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory
    #[arg(long, global = true, default_value = "hmd-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured synthetic dataset as CSV
    Generate {
        /// Output CSV path (default `<out>/dataset.csv`)
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Rank features by mutual information with the class label
    Select {
        /// Dataset CSV
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 16)]
        bins: usize,
    },
    /// Train one model on a CSV and persist it as JSON
    Train {
        /// Model type (knn, mlp, decision_tree, bagged_trees, svm,
        /// logistic_regression, oner, many_rules_oner)
        #[arg(long)]
        model: String,
        /// Training CSV
        #[arg(long)]
        data: PathBuf,
        /// Output model path (default `<out>/<model>.model.json`)
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Evaluate a saved model against a labeled CSV
    Eval {
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Print a saved model as human-readable rules or if-then tree text
    Explain {
        #[arg(long)]
        model_file: PathBuf,
    },
    /// Export ROC plot data (threshold,fpr,tpr) for a saved model
    Roc {
        #[arg(long)]
        model_file: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Estimate inference latency and resources for saved models
    Cost {
        /// One or more saved model files
        #[arg(long, required = true, num_args = 1..)]
        model_file: Vec<PathBuf>,
    },
    /// Run the full zero-day experiment and write all artifacts
    Report,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.override_seed(seed);
    }
    Ok(cfg)
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

fn write_text(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

fn cmd_generate(cli: &Cli, file: Option<PathBuf>) -> Result<()> {
    let cfg = load_config(cli)?;
    let generator = match &cfg.dataset {
        DatasetSource::Generator(g) => g.clone(),
        DatasetSource::Csv(_) => {
            return Err(Error::Config(
                "config points at a csv dataset; nothing to generate".into(),
            ))
        }
    };
    let ds = hmd_core::dataset::generate_synthetic(&generator)?;
    let path = match file {
        Some(p) => p,
        None => {
            ensure_out_dir(&cli.out)?;
            cli.out.join("dataset.csv")
        }
    };
    write_csv(&ds, &path)?;
    println!("wrote {} samples to {}", ds.len(), path.display());
    Ok(())
}

fn cmd_select(data: &Path, k: usize, bins: usize) -> Result<()> {
    let ds = parse_csv(data)?;
    let selection = select_k_best(&ds, k, bins)?;
    let mut scored = selection.all_scores.clone();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.feature_index.cmp(&b.feature_index))
    });
    println!("feature_name,score_bits");
    for s in &scored {
        println!("{},{}", ds.feature_names[s.feature_index], s.score);
    }
    Ok(())
}

fn cmd_train(cli: &Cli, model: &str, data: &Path, file: Option<PathBuf>) -> Result<()> {
    let cfg = load_config(cli)?;
    let model_type: ModelType = model.parse()?;
    let raw = parse_csv(data)?;
    let scaling = hmd_core::dataset::fit_scaling(&raw)?;
    let scaled = hmd_core::dataset::apply_scaling(&raw, &scaling)?;
    let trained = train_by_type(model_type, &scaled, &cfg)?;
    let out = ModelFile::new(trained, raw.feature_names.clone(), Some(scaling));
    let path = match file {
        Some(p) => p,
        None => {
            ensure_out_dir(&cli.out)?;
            cli.out.join(format!("{model_type}.model.json"))
        }
    };
    out.save(&path)?;
    println!(
        "trained {model_type} on {} samples -> {}",
        raw.len(),
        path.display()
    );
    Ok(())
}

fn cmd_eval(model_path: &Path, data: &Path) -> Result<()> {
    let file = ModelFile::load(model_path)?;
    let raw = parse_csv(data)?;
    let prepared = file.prepare(&raw)?;
    let preds = file.model.predict_dataset(&prepared)?;
    let labels: Vec<_> = preds.iter().map(|p| p.label).collect();
    let actuals = prepared.labels();
    let cm = confusion(&labels, &actuals)?;
    let precision = cm.precision().value;
    let recall = cm.recall().value;
    println!("model={}", file.model.model_type());
    println!(
        "tp={} fp={} tn={} fn={}",
        cm.true_positives, cm.false_positives, cm.true_negatives, cm.false_negatives
    );
    println!("accuracy={}", cm.accuracy().value);
    println!("precision={precision}");
    println!("recall={recall}");
    println!("f1={}", f1_score(precision, recall));
    let scores: Vec<f64> = preds.iter().map(|p| p.score).collect();
    match roc_curve(&scores, &actuals) {
        Ok(curve) => println!("auc={}", auc(&curve)),
        Err(Error::UndefinedRoc) => println!("auc=undefined (single-class data)"),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn cmd_explain(model_path: &Path) -> Result<()> {
    let file = ModelFile::load(model_path)?;
    let text = match &file.model {
        TrainedModel::DecisionTree(m) => m.explain(&file.feature_names),
        TrainedModel::OneR(m) | TrainedModel::ManyRulesOneR(m) => m.explain(&file.feature_names),
        other => {
            return Err(Error::Config(format!(
                "explain supports decision_tree, oner, and many_rules_oner, not {}",
                other.model_type()
            )))
        }
    };
    print!("{text}");
    Ok(())
}

fn cmd_roc(cli: &Cli, model_path: &Path, data: &Path) -> Result<()> {
    let file = ModelFile::load(model_path)?;
    let raw = parse_csv(data)?;
    let prepared = file.prepare(&raw)?;
    let preds = file.model.predict_dataset(&prepared)?;
    let scores: Vec<f64> = preds.iter().map(|p| p.score).collect();
    let curve = roc_curve(&scores, &prepared.labels())?;
    ensure_out_dir(&cli.out)?;
    let path = cli.out.join(format!("roc_{}.csv", file.model.model_type()));
    write_text(&path, &roc_csv_string(&curve))?;
    println!("auc={}", auc(&curve));
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_cost(cli: &Cli, model_paths: &[PathBuf]) -> Result<()> {
    let cfg = load_config(cli)?;
    let mut reports: Vec<(String, CostReport)> = Vec::new();
    for path in model_paths {
        let file = ModelFile::load(path)?;
        let report = estimate_cost(&file.model, &cfg.cost_table)?;
        reports.push((file.model.model_type().to_string(), report));
    }
    let ranked = rank_models(&reports);
    let csv = cost_csv_string(&ranked);
    print!("{csv}");
    ensure_out_dir(&cli.out)?;
    write_text(&cli.out.join("cost.csv"), &csv)?;
    Ok(())
}

fn cmd_report(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    ensure_out_dir(&cli.out)?;
    report::run_report(&cfg, &cli.out)?;
    let table = std::fs::read_to_string(cli.out.join("report.txt")).map_err(|e| Error::Io {
        path: cli.out.display().to_string(),
        source: e,
    })?;
    print!("{table}");
    println!("artifacts written to {}", cli.out.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate { file } => cmd_generate(cli, file.clone()),
        Command::Select { data, k, bins } => cmd_select(data, *k, *bins),
        Command::Train { model, data, file } => cmd_train(cli, model, data, file.clone()),
        Command::Eval { model_file, data } => cmd_eval(model_file, data),
        Command::Explain { model_file } => cmd_explain(model_file),
        Command::Roc { model_file, data } => cmd_roc(cli, model_file, data),
        Command::Cost { model_file } => cmd_cost(cli, model_file),
        Command::Report => cmd_report(cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_or_data() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
