//! `sentikit` command-line tool.
//!
//! Exit status is 0 on success, 1 when processing fails and 2 for invalid
//! configuration or a model that does not match the given config/lexicons.

mod config;

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sentikit::corpus::load_dataset;
use sentikit::eval::{cross_validate, evaluate, EvaluationReport, Metric};
use sentikit::learn::ClassifierKind;
use sentikit::lexicon::{generate_auto_lexicon, lexicon_classify, score_documents, DEFAULT_MIN_OCCURRENCES};
use sentikit::pipeline::{PipelineTrainer, SentimentModel};
use sentikit::preprocess::NgramRange;
use sentikit::{Dataset, Document, Label};

use config::{load_lexicons, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] sentikit::Error),
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Core(sentikit::Error::ConfigMismatch(_)) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "sentikit", version, about = "Lexicon and machine-learning sentiment classification for short texts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Corpus TSV: `id<TAB>label<TAB>text`, label `?` when unknown.
    #[arg(long)]
    input: PathBuf,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Lexicon file as `path[:priority]`; lower priority wins on overlap.
    /// `builtin:emo` names the bundled emoticon/slang list.
    #[arg(long = "lexicon")]
    lexicons: Vec<String>,
}

#[derive(Args)]
struct TrainArgs {
    /// N-gram range, e.g. `1..2`.
    #[arg(long)]
    ngrams: Option<NgramRange>,
    #[arg(long)]
    classifier: Option<ClassifierKind>,
    #[arg(long)]
    cost_sensitive: bool,
    /// Cost matrix file (implies --cost-sensitive).
    #[arg(long)]
    cost_matrix: Option<PathBuf>,
    /// Keep only features with information gain above this.
    #[arg(long)]
    select_ig: Option<f64>,
    /// Leave out the hand-built features (n-grams only).
    #[arg(long)]
    no_manual_features: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Headline metric: semeval-f, accuracy or macro-f1.
    #[arg(long)]
    metric: Option<Metric>,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Induce a lexicon from a labeled corpus.
    GenLexicon {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        min_occurrences: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print `id<TAB>avg<TAB>log` lexicon scores.
    LexScore {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label documents by clustering their lexicon scores.
    LexClassify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model and write it to --model.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        model: PathBuf,
    },
    /// Write `id<TAB>label` predictions.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        /// Must match the model's n-gram range when given.
        #[arg(long)]
        ngrams: Option<NgramRange>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a model, or a predictions TSV, against the gold labels of --input.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long, required_unless_present = "predictions", conflicts_with = "predictions")]
        model: Option<PathBuf>,
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Stratified k-fold cross-validation.
    Cv {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long)]
        folds: Option<usize>,
        #[command(flatten)]
        report: ReportArgs,
    },
}

fn settings(common: &Common, train: Option<&TrainArgs>) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if !common.lexicons.is_empty() {
        cfg.lexicons = common.lexicons.clone();
    }
    if let Some(t) = train {
        if let Some(n) = t.ngrams {
            cfg.train.space.ngrams = n;
        }
        if let Some(k) = t.classifier {
            cfg.train.classifier = k;
        }
        if t.cost_sensitive {
            cfg.train.cost_sensitive = true;
        }
        if let Some(p) = &t.cost_matrix {
            cfg.cost_matrix_file = Some(p.clone());
            cfg.train.cost_matrix = None;
            cfg.train.cost_sensitive = true;
        }
        if let Some(s) = t.select_ig {
            cfg.train.select_ig = Some(s);
        }
        if t.no_manual_features {
            cfg.train.space.manual_features = false;
        }
    }
    cfg.validate()?;
    cfg.train.cost_matrix = cfg.cost_matrix()?;
    cfg.train.hyper.svm.seed = cfg.seed;
    Ok(cfg)
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn print_report<T: serde::Serialize>(report: &EvaluationReport, full: &T, args: &ReportArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let metric = args.metric.unwrap_or(cfg.metric);
    let text = if args.json {
        let mut s = serde_json::to_string_pretty(full).expect("serializable");
        s.push('\n');
        s
    } else {
        format!("{report}\n{metric}: {:.4}\n", report.metric(metric))
    };
    write_output(None, &text)
}

fn labeled_pairs(d: &Dataset, pred: impl Fn(&Document) -> Result<Label, CliError>) -> Result<(Vec<Label>, Vec<Label>), CliError> {
    let mut p = Vec::new();
    let mut g = Vec::new();
    for (doc, gold) in d.labeled() {
        p.push(pred(doc)?);
        g.push(gold);
    }
    Ok((p, g))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenLexicon {
            common,
            min_occurrences,
            out,
        } => {
            let cfg = settings(&common, None)?;
            let d = load_dataset(&common.input)?;
            let min = min_occurrences
                .or(cfg.min_occurrences)
                .unwrap_or(DEFAULT_MIN_OCCURRENCES);
            let lex = generate_auto_lexicon(&d, &cfg.pipeline, min)?;
            write_output(out.as_deref(), &lex.to_tsv())
        }
        Command::LexScore { common, out } => {
            let cfg = settings(&common, None)?;
            let d = load_dataset(&common.input)?;
            let lex = load_lexicons(&cfg.lexicons)?;
            let mut s = String::new();
            for (doc, score) in d.documents().iter().zip(score_documents(&d, &lex, &cfg.pipeline)) {
                s.push_str(&format!("{}\t{}\t{}\n", doc.id, score.avg, score.log));
            }
            write_output(out.as_deref(), &s)
        }
        Command::LexClassify { common, out } => {
            let cfg = settings(&common, None)?;
            let d = load_dataset(&common.input)?;
            let lex = load_lexicons(&cfg.lexicons)?;
            let result = lexicon_classify(&d, &lex, &cfg.pipeline, cfg.seed)?;
            let mut s = String::new();
            for (doc, label) in d.documents().iter().zip(&result.labels) {
                s.push_str(&format!("{}\t{}\n", doc.id, label));
            }
            write_output(out.as_deref(), &s)?;
            if let Some(acc) = result.accuracy {
                eprintln!("accuracy: {acc:.4}");
            }
            Ok(())
        }
        Command::Train { common, train, model } => {
            let cfg = settings(&common, Some(&train))?;
            let d = load_dataset(&common.input)?;
            let lex = load_lexicons(&cfg.lexicons)?;
            let docs: Vec<&Document> = d.labeled().map(|(doc, _)| doc).collect();
            let m = SentimentModel::train(&docs, &lex, &cfg.pipeline, &cfg.train)?;
            m.save(&model)?;
            Ok(())
        }
        Command::Predict {
            common,
            model,
            ngrams,
            out,
        } => {
            let cfg = settings(&common, None)?;
            let m = SentimentModel::load(&model)?;
            if common.config.is_some() && cfg.pipeline != m.pipeline_config {
                return Err(sentikit::Error::ConfigMismatch("preprocessing config".into()).into());
            }
            if ngrams.is_some_and(|n| n != m.feature_space.ngram_range()) {
                return Err(sentikit::Error::ConfigMismatch("n-gram range".into()).into());
            }
            let lex = load_lexicons(&cfg.lexicons)?;
            let predictor = m.predictor(&lex)?;
            let d = load_dataset(&common.input)?;
            let mut s = String::new();
            for doc in d.documents() {
                s.push_str(&format!("{}\t{}\n", doc.id, predictor.predict_text(&doc.text)?));
            }
            write_output(out.as_deref(), &s)
        }
        Command::Evaluate {
            common,
            model,
            predictions,
            report,
        } => {
            let cfg = settings(&common, None)?;
            let d = load_dataset(&common.input)?;
            let (pred, gold) = if let Some(path) = predictions {
                let text = std::fs::read_to_string(&path).map_err(|e| sentikit::Error::Io { path: path.clone(), source: e })?;
                let by_id = parse_predictions(&text)?;
                labeled_pairs(&d, |doc| {
                    by_id
                        .get(doc.id.as_str())
                        .copied()
                        .ok_or_else(|| sentikit::Error::Model(format!("no prediction for document {:?}", doc.id)).into())
                })?
            } else {
                let m = SentimentModel::load(model.as_deref().expect("clap requires --model"))?;
                let lex = load_lexicons(&cfg.lexicons)?;
                let predictor = m.predictor(&lex)?;
                labeled_pairs(&d, |doc| Ok(predictor.predict_text(&doc.text)?))?
            };
            let r = evaluate(&pred, &gold)?;
            print_report(&r, &r, &report, &cfg)
        }
        Command::Cv {
            common,
            train,
            folds,
            report,
        } => {
            let cfg = settings(&common, Some(&train))?;
            let d = load_dataset(&common.input)?;
            let trainer = PipelineTrainer {
                lexicon: load_lexicons(&cfg.lexicons)?,
                config: cfg.pipeline.clone(),
                spec: cfg.train.clone(),
            };
            let k = folds.or(cfg.folds).unwrap_or(10);
            let r = cross_validate(&d, &trainer, k, cfg.seed)?;
            print_report(&r.pooled, &r, &report, &cfg)
        }
    }
}

/// Parses `id<TAB>label` lines.
fn parse_predictions(text: &str) -> Result<HashMap<&str, Label>, sentikit::Error> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, label) = line.split_once('\t').ok_or_else(|| sentikit::Error::MalformedLine {
            line: i + 1,
            reason: "expected id<TAB>label".into(),
        })?;
        out.insert(id, label.trim().parse()?);
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
