use std::path::{Path, PathBuf};

use serde::Deserialize;
use sentikit::eval::Metric;
use sentikit::learn::CostMatrix;
use sentikit::lexicon::{merge_lexicons, Lexicon};
use sentikit::pipeline::TrainSpec;
use sentikit::PipelineConfig;

use crate::CliError;

/// Token standing for the bundled starter emoticon/slang lexicon.
pub const BUILTIN_EMO: &str = "builtin:emo";

/// Experiment settings read from a TOML file. Every key is optional and
/// command-line flags override what the file says.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// `path[:priority]` entries, as with `--lexicon`.
    pub lexicons: Vec<String>,
    pub metric: Metric,
    pub folds: Option<usize>,
    pub min_occurrences: Option<usize>,
    /// Path of a cost matrix file; an inline `train.cost_matrix` wins.
    pub cost_matrix_file: Option<PathBuf>,
    pub pipeline: PipelineConfig,
    pub train: TrainSpec,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.pipeline.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(t) = self.train.select_ig {
            if !(t >= 0.0) {
                return Err(CliError::Config(format!("select_ig must be >= 0, got {t}")));
            }
        }
        if self.folds.is_some_and(|k| k < 2) {
            return Err(CliError::Config("folds must be at least 2".into()));
        }
        Ok(())
    }

    pub fn cost_matrix(&self) -> Result<Option<CostMatrix>, CliError> {
        if self.train.cost_matrix.is_some() {
            return Ok(self.train.cost_matrix);
        }
        match &self.cost_matrix_file {
            Some(p) => CostMatrix::load(p).map(Some).map_err(|e| CliError::Config(e.to_string())),
            None => Ok(None),
        }
    }
}

/// Splits `path[:priority]`. Without a priority, `default` is used.
pub fn parse_lexicon_arg(arg: &str, default: i32) -> (String, i32) {
    if let Some((path, p)) = arg.rsplit_once(':') {
        if let Ok(priority) = p.parse::<i32>() {
            return (path.to_string(), priority);
        }
    }
    (arg.to_string(), default)
}

/// Loads and merges lexicons. With no arguments, the built-in starter
/// lexicon is used. Entries without a priority rank in argument order.
pub fn load_lexicons(args: &[String]) -> Result<Lexicon, CliError> {
    if args.is_empty() {
        return Ok(Lexicon::starter_emo());
    }
    let mut lexicons = Vec::with_capacity(args.len());
    for (i, arg) in args.iter().enumerate() {
        let (path, priority) = parse_lexicon_arg(arg, i as i32);
        let lex = if path == BUILTIN_EMO {
            Lexicon::starter_emo().with_priority(priority)
        } else {
            Lexicon::load(&path, priority)?
        };
        lexicons.push(lex);
    }
    Ok(merge_lexicons(&lexicons).expect("at least one lexicon"))
}
