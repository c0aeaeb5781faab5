use std::path::Path;

use log::info;
use serde::Serialize;
use serde_json::json;

use sentirec::classify::{ModelKind, SentimentModel, TrainConfig};
use sentirec::corpus::{self, Dataset, QueryCustomer, SplitSpec};
use sentirec::eval::{evaluate, ConfusionMatrix};
use sentirec::recommend::recommend;

use crate::{
    Cli, CliError, Command, EvaluateArgs, GenDataArgs, OutputMode, PredictArgs, RecommendArgs,
    TrainArgs,
};

type CmdResult = Result<(), CliError>;

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::GenData(args) => gen_data(cli, args),
        Command::Train(args) => train(cli, args),
        Command::Evaluate(args) => evaluate_cmd(cli, args),
        Command::Predict(args) => predict(cli, args),
        Command::Recommend(args) => recommend_cmd(cli, args),
    }
}

fn emit<T: Serialize>(cli: &Cli, text: impl FnOnce() -> String, value: &T) -> CmdResult {
    match cli.output {
        OutputMode::Text => println!("{}", text()),
        OutputMode::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).map_err(|e| CliError {
                code: 3,
                message: e.to_string(),
            })?
        ),
    }
    Ok(())
}

fn load_data(path: &Path) -> Result<Dataset, CliError> {
    info!("loading {}", path.display());
    corpus::load_csv(path).map_err(|e| CliError {
        message: format!("{}: {}", path.display(), e),
        ..e.into()
    })
}

fn load_model(path: &Path) -> Result<SentimentModel, CliError> {
    SentimentModel::load(path).map_err(|e| CliError {
        message: format!("{}: {}", path.display(), e),
        ..e.into()
    })
}

fn gen_data(cli: &Cli, args: &GenDataArgs) -> CmdResult {
    if args.rows == 0 {
        return Err(CliError::usage("--rows must be at least 1"));
    }
    let ds = corpus::generate_synthetic(args.rows, cli.seed, args.paper_fixture)?;
    corpus::write_csv_file(&ds, &args.out).map_err(|e| CliError {
        message: format!("{}: {}", args.out.display(), e),
        ..e.into()
    })?;
    emit(
        cli,
        || format!("wrote {} rows to {}", ds.len(), args.out.display()),
        &json!({
            "out": args.out,
            "rows": ds.len(),
            "seed": cli.seed,
            "paper_fixture": args.paper_fixture,
        }),
    )
}

fn split_spec(cli: &Cli, test_fraction: f64) -> Result<SplitSpec, CliError> {
    SplitSpec::new(test_fraction, cli.seed).map_err(|e| CliError::usage(e.to_string()))
}

fn train_config(cli: &Cli, args: &TrainArgs) -> TrainConfig {
    let mut cfg = TrainConfig::new(args.model);
    cfg.seed = cli.seed;
    if let Some(v) = args.max_terms {
        cfg.max_terms = v;
    }
    if let Some(v) = args.learning_rate {
        cfg.logistic.learning_rate = v;
    }
    if let Some(v) = args.epochs {
        cfg.logistic.epochs = v;
    }
    if let Some(v) = args.l2 {
        cfg.logistic.l2_lambda = v;
    }
    if let Some(v) = args.alpha {
        cfg.naive_bayes.alpha = v;
    }
    if let Some(v) = args.trees {
        cfg.forest.n_trees = v;
    }
    if args.no_depth_limit {
        cfg.forest.max_depth = None;
    } else if let Some(v) = args.max_depth {
        cfg.forest.max_depth = Some(v);
    }
    if let Some(v) = args.min_samples_split {
        cfg.forest.min_samples_split = v;
    }
    cfg
}

#[derive(Serialize)]
struct TrainSummary<'a> {
    model_kind: ModelKind,
    model_file: &'a Path,
    train_rows: usize,
    test_rows: usize,
    vocabulary_size: usize,
    evaluation: sentirec::eval::Report,
}

fn train(cli: &Cli, args: &TrainArgs) -> CmdResult {
    let cfg = train_config(cli, args);
    cfg.validate()?;
    let spec = split_spec(cli, args.split.test_fraction)?;
    let ds = load_data(&args.data)?;
    let (train_set, test_set) = corpus::split(&ds, &spec)?;

    info!(
        "training {} on {} rows ({} held out)",
        args.model,
        train_set.len(),
        test_set.len()
    );
    let model = SentimentModel::train_with_threads(train_set.records(), &cfg, args.threads)?;
    model.save(&args.out).map_err(|e| CliError {
        message: format!("{}: {}", args.out.display(), e),
        ..e.into()
    })?;
    let confusion = evaluate(&model, test_set.records())?;

    let summary = TrainSummary {
        model_kind: args.model,
        model_file: &args.out,
        train_rows: train_set.len(),
        test_rows: test_set.len(),
        vocabulary_size: model.vocabulary().len(),
        evaluation: confusion.report(),
    };
    emit(cli, || confusion.to_string(), &summary)
}

fn evaluate_cmd(cli: &Cli, args: &EvaluateArgs) -> CmdResult {
    let spec = split_spec(cli, args.split.test_fraction)?;
    let model = load_model(&args.model_file)?;
    let ds = load_data(&args.data)?;
    let confusion: ConfusionMatrix = if args.all_rows {
        evaluate(&model, ds.records())?
    } else {
        let (_, test_set) = corpus::split(&ds, &spec)?;
        evaluate(&model, test_set.records())?
    };
    emit(cli, || confusion.to_string(), &confusion.report())
}

#[derive(Serialize)]
struct Prediction {
    model_kind: ModelKind,
    label: u8,
}

fn predict(cli: &Cli, args: &PredictArgs) -> CmdResult {
    if args.text.trim().is_empty() {
        return Err(CliError::usage("--text must not be empty"));
    }
    let mut models = args
        .model_file
        .iter()
        .map(|p| load_model(p))
        .collect::<Result<Vec<_>, _>>()?;

    if args.all {
        let order = [
            ModelKind::Logistic,
            ModelKind::Forest,
            ModelKind::NaiveBayes,
        ];
        let kinds: Vec<ModelKind> = models.iter().map(SentimentModel::kind).collect();
        if models.len() != 3 || order.iter().any(|k| !kinds.contains(k)) {
            return Err(CliError::usage(
                "--all needs exactly three model files: one each of lr, rf and mnb",
            ));
        }
        models.sort_by_key(|m| order.iter().position(|k| *k == m.kind()));
    } else if models.len() != 1 {
        return Err(CliError::usage(
            "pass one --model-file, or three together with --all",
        ));
    }

    let predictions: Vec<Prediction> = models
        .iter()
        .map(|m| Prediction {
            model_kind: m.kind(),
            label: m.predict_text(&args.text).as_u8(),
        })
        .collect();
    emit(
        cli,
        || {
            predictions
                .iter()
                .map(|p| p.label.to_string())
                .collect::<Vec<_>>()
                .join("\n")
        },
        &json!({ "predictions": predictions }),
    )
}

fn recommend_cmd(cli: &Cli, args: &RecommendArgs) -> CmdResult {
    if args.feedback.trim().is_empty() {
        return Err(CliError::usage("--feedback must not be empty"));
    }
    if args.income == 0 {
        return Err(CliError::usage("--income must be a positive category"));
    }
    let model = load_model(&args.model_file)?;
    let ds = load_data(&args.data)?;
    let query = QueryCustomer::new(
        args.age,
        args.gender,
        args.income,
        args.locality,
        args.feedback.clone(),
    )
    .with_reviewed_product(args.reviewed_product);
    let result = recommend(&ds, &model, &query)?;
    emit(cli, || result.to_string(), &result)
}
