use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use umrahguard_core::classifiers::{load_model, save_model, FORMAT_VERSION};
use umrahguard_core::corpus::{
    apply_labeling_criteria, clean_dataset, generate_synthetic, load_dataset, official_agencies, write_dataset,
    AppRecord, Label, RegistrySnapshot,
};
use umrahguard_core::evaluation::{
    ablation_table, compute_metrics, confusion_from_predictions, default_ablation_configs, evaluate, importance_table,
    metrics_table, rank_feature_importance, run_ablation, write_ablation_csv, write_importance_csv, write_metrics_csv,
    MetricsRow,
};
use umrahguard_core::features::PreparedRecord;
use umrahguard_core::textprep::TextPipeline;
use umrahguard_core::tuning::{describe_params, grid_search, stratified_k_fold, CvSetup, FoldPlan};
use umrahguard_core::{ModelSpec, ParamGrid, TrainedModel};
use umrahguard_service::TOP_FEATURES;

use crate::{Cli, Command, DataArgs, Family, RunConfig, UsageError};

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    argv: &'a [String],
    seed: Option<u64>,
    config: &'a RunConfig,
    versions: Value,
    outputs: &'a [String],
    status: String,
}

struct Run {
    config: RunConfig,
    outputs: Vec<String>,
    out_dir: PathBuf,
}

impl Run {
    fn seed(&self) -> Result<u64> {
        self.config
            .seed
            .ok_or_else(|| usage("a seed is required: pass --seed or set \"seed\" in the config"))
    }

    fn output(&mut self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("cannot create output directory {}", self.out_dir.display()))?;
        self.outputs.push(name.to_string());
        Ok(self.out_dir.join(name))
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.output(name)?;
        let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(BufWriter::new(file))
    }

    fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.output(name)?;
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }

    fn spec(&self, family: Option<Family>) -> Result<ModelSpec> {
        let spec = match family {
            Some(f) => reference_spec(f),
            None => self.config.model.unwrap_or_else(ModelSpec::reference_svm),
        };
        Ok(spec.with_seed(self.seed()?))
    }

    fn text(&self) -> Result<TextPipeline> {
        self.config.text_pipeline()
    }

    fn dataset(&self, args: &DataArgs, text: &TextPipeline) -> Result<Vec<PreparedRecord>> {
        let path = args
            .data
            .clone()
            .or_else(|| self.config.dataset.clone())
            .ok_or_else(|| usage("no dataset: pass --data or set \"dataset\" in the config"))?;
        let records = load_dataset(&path).with_context(|| format!("cannot load dataset {}", path.display()))?;
        let registry = match args.registry.clone().or_else(|| self.config.registry.clone()) {
            Some(p) => {
                Some(RegistrySnapshot::load(&p).with_context(|| format!("cannot load registry {}", p.display()))?)
            }
            None => None,
        };
        let mut records = clean_dataset(records);
        for r in records.iter_mut().filter(|r| r.label.is_none()) {
            match &registry {
                Some(reg) => r.label = Some(apply_labeling_criteria(r, reg).label),
                None => {
                    return Err(anyhow!(
                        "record {} has no label; supply a registry snapshot to label it",
                        r.app_id
                    ))
                }
            }
        }
        Ok(PreparedRecord::prepare_all(records, text))
    }

    fn plan(&self, data: &[PreparedRecord]) -> Result<FoldPlan> {
        let labels: Vec<Label> = data.iter().map(|p| p.record.label.expect("labeled")).collect();
        Ok(stratified_k_fold(&labels, self.config.folds, self.seed()?)?)
    }
}

fn reference_spec(family: Family) -> ModelSpec {
    match family {
        Family::Svm => ModelSpec::reference_svm(),
        Family::Rf => ModelSpec::reference_rf(),
        Family::Nb => ModelSpec::reference_nb(),
    }
}

pub fn execute(cli: Cli, argv: Vec<String>) -> Result<()> {
    let mut config = match &cli.common.config {
        Some(path) => RunConfig::load(path).map_err(|e| usage(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.common.seed {
        config.seed = Some(seed);
    }
    if let Some(folds) = cli.common.folds {
        config.folds = folds;
    }
    let out_dir = match (&cli.command, &cli.common.out) {
        (Command::GenData { .. }, Some(file)) => file
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
        (_, Some(dir)) => dir.clone(),
        (_, None) => config.out.clone(),
    };
    config.out = out_dir.clone();
    config.validate_paths().map_err(|e| usage(e.to_string()))?;

    let name = cli.command.name();
    let mut run = Run {
        config,
        outputs: Vec::new(),
        out_dir,
    };
    let result = dispatch(&mut run, cli.command, cli.common.out);
    // usage errors leave no trace on disk
    let usage_error = matches!(&result, Err(e) if e.is::<UsageError>());
    if name != "serve" && !usage_error {
        let status = match &result {
            Ok(()) => "ok".to_string(),
            Err(e) => format!("error: {e:#}"),
        };
        write_manifest(&mut run, name, &argv, status)?;
    }
    result
}

fn write_manifest(run: &mut Run, command: &str, argv: &[String], status: String) -> Result<()> {
    let outputs = run.outputs.clone();
    let manifest = Manifest {
        command,
        argv,
        seed: run.config.seed,
        config: &run.config,
        versions: json!({
            "umrahguard": env!("CARGO_PKG_VERSION"),
            "model_format": FORMAT_VERSION,
        }),
        outputs: &outputs,
        status,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    let path = run.output("run-manifest.json")?;
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn dispatch(run: &mut Run, command: Command, out_flag: Option<PathBuf>) -> Result<()> {
    match command {
        Command::GenData { registry_out } => gen_data(run, out_flag, registry_out),
        Command::Train { data, family } => train(run, &data, family),
        Command::Evaluate { data, model } => evaluate_cmd(run, &data, model),
        Command::GridSearch { data, family } => grid(run, &data, family),
        Command::Ablate { data, family } => ablate(run, &data, family),
        Command::Importance { data, model, top } => importance(run, &data, model, top),
        Command::Predict { model, input } => predict(run, &model, &input),
        Command::Serve { model, addr } => serve(run, &model, addr),
    }
}

fn gen_data(run: &mut Run, out_file: Option<PathBuf>, registry_out: Option<PathBuf>) -> Result<()> {
    let mut generator = run.config.generator.clone();
    generator.seed = run.seed()?;
    let records = generate_synthetic(&generator)?;
    let path = match out_file {
        Some(file) => {
            fs::create_dir_all(&run.out_dir)?;
            run.outputs.push(
                file.file_name()
                    .map(|f| f.to_string_lossy().into_owned())
                    .unwrap_or_default(),
            );
            file
        }
        None => run.output("apps.jsonl")?,
    };
    write_dataset(&path, &records).with_context(|| format!("cannot write {}", path.display()))?;
    if let Some(reg_path) = registry_out {
        let registry = RegistrySnapshot::new(
            official_agencies(generator.n_official),
            RegistrySnapshot::default_free_email_domains(),
            run.config.watchlist.clone(),
        )?;
        registry
            .save(&reg_path)
            .with_context(|| format!("cannot write {}", reg_path.display()))?;
    }
    let official = records.iter().filter(|r| r.label == Some(Label::Official)).count();
    println!(
        "wrote {} records ({} official, {} unofficial) to {}",
        records.len(),
        official,
        records.len() - official,
        path.display()
    );
    Ok(())
}

fn setup<'a>(
    run: &'a Run,
    text: &'a TextPipeline,
    aug: Option<&'a umrahguard_core::tuning::Augmentation>,
) -> CvSetup<'a> {
    CvSetup {
        feature_config: run.config.features,
        watchlist: &run.config.watchlist,
        text,
        augmentation: aug,
        metric: run.config.metric,
    }
}

fn train(run: &mut Run, args: &DataArgs, family: Option<Family>) -> Result<()> {
    let text = run.text()?;
    let data = run.dataset(args, &text)?;
    let spec = run.spec(family)?;
    let aug = run.config.augmentation(run.seed()?)?;
    let training = match &aug {
        Some(a) => a.apply(&data, &text),
        None => data,
    };
    let model = TrainedModel::train(&spec, &training, &run.config.watchlist, run.config.features)?;
    let path = run.output("model.json")?;
    save_model(&model, &path)?;
    println!(
        "trained {} on {} records ({} features); model written to {}",
        spec.display_name(),
        training.len(),
        model.pipeline.width(),
        path.display()
    );
    Ok(())
}

fn evaluate_cmd(run: &mut Run, args: &DataArgs, model_path: Option<PathBuf>) -> Result<()> {
    let text = run.text()?;
    let data = run.dataset(args, &text)?;
    let rows = match model_path {
        Some(path) => {
            let model = load_model(&path)?;
            let truth: Vec<Label> = data.iter().map(|p| p.record.label.expect("labeled")).collect();
            let predicted: Vec<Label> = data.iter().map(|p| model.predict_prepared(p).label).collect();
            let confusion = confusion_from_predictions(&truth, &predicted)?;
            let metrics = compute_metrics(&confusion)?;
            vec![MetricsRow {
                model: format!("{} (saved model)", model.model.family()),
                metrics,
                confusion,
                cv_mean: metrics.accuracy,
                cv_std: 0.0,
            }]
        }
        None => {
            let seed = run.seed()?;
            let specs = run.config.models.clone().unwrap_or_else(|| {
                vec![
                    ModelSpec::reference_svm(),
                    ModelSpec::reference_rf(),
                    ModelSpec::reference_nb(),
                ]
            });
            let plan = run.plan(&data)?;
            let aug = run.config.augmentation(seed)?;
            let setup = setup(run, &text, aug.as_ref());
            let mut rows = Vec::with_capacity(specs.len());
            for spec in specs {
                let spec = spec.with_seed(seed);
                rows.push(evaluate(&spec.display_name(), &spec, &data, &plan, &setup)?.row());
            }
            rows
        }
    };
    let mut csv = run.create("metrics.csv")?;
    write_metrics_csv(&mut csv, &rows)?;
    csv.flush()?;
    let table = metrics_table(&rows);
    run.write_text("metrics.txt", &table)?;
    print!("{table}");
    Ok(())
}

fn grid(run: &mut Run, args: &DataArgs, family: Option<Family>) -> Result<()> {
    let text = run.text()?;
    let data = run.dataset(args, &text)?;
    let base = run.spec(family)?;
    let grid = match (&run.config.grid, family) {
        (Some(g), None) => g.clone(),
        _ => ParamGrid::reference(base.family()).expect("every family has a reference grid"),
    };
    let plan = run.plan(&data)?;
    let aug = run.config.augmentation(run.seed()?)?;
    let result = grid_search(&base, &grid, &data, &plan, &setup(run, &text, aug.as_ref()))?;

    let mut w = csv::Writer::from_writer(run.create("grid.csv")?);
    w.write_record(["index", "params", "mean", "std"])?;
    for (i, c) in result.candidates.iter().enumerate() {
        w.write_record([
            i.to_string(),
            serde_json::to_string(&c.params)?,
            format!("{:.6}", c.mean),
            format!("{:.6}", c.std),
        ])?;
    }
    w.flush()?;
    let best = json!({
        "params": result.candidates[result.best_index].params,
        "score": result.best_score,
        "metric": run.config.metric,
        "candidates": result.candidates.len(),
        "spec": result.best_spec,
    });
    run.write_text("best-params.json", &(serde_json::to_string_pretty(&best)? + "\n"))?;
    let model_path = run.output("model.json")?;
    save_model(&result.final_model, &model_path)?;
    println!(
        "evaluated {} candidates; best: {} ({} {:.4})",
        result.candidates.len(),
        describe_params(&result.best_params),
        match run.config.metric {
            umrahguard_core::tuning::Metric::Accuracy => "accuracy",
            umrahguard_core::tuning::Metric::F1 => "f1",
        },
        result.best_score
    );
    Ok(())
}

fn ablate(run: &mut Run, args: &DataArgs, family: Option<Family>) -> Result<()> {
    let text = run.text()?;
    let data = run.dataset(args, &text)?;
    let spec = run.spec(family)?;
    let configs = run.config.ablation.clone().unwrap_or_else(default_ablation_configs);
    let plan = run.plan(&data)?;
    let aug = run.config.augmentation(run.seed()?)?;
    let rows = run_ablation(&spec, &data, &configs, &plan, &setup(run, &text, aug.as_ref()))?;
    let mut csv = run.create("ablation.csv")?;
    write_ablation_csv(&mut csv, &rows)?;
    csv.flush()?;
    let table = ablation_table(&rows);
    run.write_text("ablation.txt", &table)?;
    print!("{table}");
    Ok(())
}

fn importance(run: &mut Run, args: &DataArgs, model_path: Option<PathBuf>, top: usize) -> Result<()> {
    let model = match model_path {
        Some(path) => load_model(&path)?,
        None => {
            let text = run.text()?;
            let data = run.dataset(args, &text)?;
            let spec = ModelSpec::reference_rf().with_seed(run.seed()?);
            TrainedModel::train(&spec, &data, &run.config.watchlist, run.config.features)?
        }
    };
    let ranked = rank_feature_importance(&model)?;
    let mut csv = run.create("importance.csv")?;
    write_importance_csv(&mut csv, &ranked)?;
    csv.flush()?;
    let table = importance_table(&ranked, top);
    run.write_text("importance.txt", &table)?;
    print!("{table}");
    Ok(())
}

#[derive(Serialize)]
struct PredictionLine<'a> {
    app_id: &'a str,
    label: &'a str,
    confidence: f64,
    top_features: Vec<(String, f64)>,
}

/// One JSON line per record, in input order.
pub fn prediction_lines(model: &TrainedModel, text: &TextPipeline, records: &[AppRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| {
            let e = model.explain(r, text, TOP_FEATURES);
            let line = PredictionLine {
                app_id: &r.app_id,
                label: e.label.as_str(),
                confidence: e.confidence,
                top_features: e.top_features.into_iter().map(|f| (f.name, f.weight)).collect(),
            };
            serde_json::to_string(&line).expect("prediction serializes")
        })
        .collect()
}

fn predict(run: &mut Run, model_path: &Path, input: &Path) -> Result<()> {
    let model = load_model(model_path)?;
    let text = run.text()?;
    let records = load_dataset(input).with_context(|| format!("cannot load {}", input.display()))?;
    let lines = prediction_lines(&model, &text, &records);
    let mut file = run.create("predictions.jsonl")?;
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();
    for line in &lines {
        writeln!(stdout, "{line}")?;
        writeln!(file, "{line}")?;
    }
    file.flush()?;
    Ok(())
}

fn serve(run: &mut Run, model_path: &Path, addr: std::net::SocketAddr) -> Result<()> {
    let text = run.text()?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("cannot start async runtime")?;
    runtime
        .block_on(umrahguard_service::serve(addr, model_path, text))
        .context("server failed")
}
