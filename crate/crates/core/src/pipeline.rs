//! End-to-end supervised models: feature space, optional feature selection,
//! classifier and cost matrix, serialized together as one JSON document.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Document, Label};
use crate::error::{Error, Result};
use crate::eval::{Predictor, Trainer};
use crate::features::{information_gain, select_features, Extractor, FeatureSpace, FeatureVector, SpaceOptions};
use crate::learn::{Classifier, ClassifierKind, CostMatrix, Hyperparameters};
use crate::lexicon::Lexicon;
use crate::preprocess::PipelineConfig;

pub const FORMAT_VERSION: u32 = 1;

/// Everything needed to train a model besides data, lexicon and
/// preprocessing config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSpec {
    pub classifier: ClassifierKind,
    pub space: SpaceOptions,
    /// Keep only columns whose information gain exceeds this.
    pub select_ig: Option<f64>,
    pub hyper: Hyperparameters,
    pub cost_sensitive: bool,
    /// Used when `cost_sensitive` is set; defaults to [`CostMatrix::default`].
    pub cost_matrix: Option<CostMatrix>,
}

impl Default for TrainSpec {
    fn default() -> Self {
        TrainSpec {
            classifier: ClassifierKind::Nb,
            space: SpaceOptions::default(),
            select_ig: None,
            hyper: Hyperparameters::default(),
            cost_sensitive: false,
            cost_matrix: None,
        }
    }
}

impl TrainSpec {
    pub fn effective_costs(&self) -> Option<CostMatrix> {
        self.cost_sensitive.then(|| self.cost_matrix.unwrap_or_default())
    }
}

/// Hash tying a model to the preprocessing config and lexicon it was
/// trained with.
pub fn config_hash(cfg: &PipelineConfig, lexicon_fingerprint: &str) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(cfg).expect("serializable"));
    h.update([0]);
    h.update(lexicon_fingerprint.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SentimentModel {
    pub format_version: u32,
    pub model_kind: ClassifierKind,
    pub pipeline_config: PipelineConfig,
    pub lexicon_fingerprint: String,
    pub config_hash: String,
    pub feature_space_hash: String,
    pub feature_space: FeatureSpace,
    pub cost_matrix: Option<CostMatrix>,
    pub parameters: Classifier,
}

fn gold_labels(docs: &[&Document]) -> Result<Vec<Label>> {
    docs.iter()
        .map(|d| d.label.ok_or_else(|| Error::Unlabeled(d.id.clone())))
        .collect()
}

impl SentimentModel {
    /// Trains on labeled documents. Every document must carry a label.
    pub fn train(docs: &[&Document], lexicon: &Lexicon, cfg: &PipelineConfig, spec: &TrainSpec) -> Result<Self> {
        cfg.validate()?;
        let labels = gold_labels(docs)?;
        if docs.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        let extractor = Extractor::new(cfg.clone(), lexicon.clone());
        let full = FeatureSpace::build(docs, &extractor, &spec.space)?;
        let mut vectors: Vec<FeatureVector> = docs.iter().map(|d| full.vectorize_with(&d.text, &extractor)).collect();
        let space = match spec.select_ig {
            Some(threshold) => {
                let ig = information_gain(&full, &vectors, &labels)?;
                let selected = select_features(&full, &ig, threshold)?;
                vectors = vectors.iter().map(|v| selected.project(v, &full)).collect();
                selected
            }
            None => full,
        };
        let cost_matrix = spec.effective_costs();
        let parameters = Classifier::train(
            spec.classifier,
            &vectors,
            &labels,
            space.len(),
            &spec.hyper,
            cost_matrix.as_ref(),
        )?;
        let lexicon_fingerprint = lexicon.fingerprint();
        Ok(SentimentModel {
            format_version: FORMAT_VERSION,
            model_kind: spec.classifier,
            config_hash: config_hash(cfg, &lexicon_fingerprint),
            pipeline_config: cfg.clone(),
            lexicon_fingerprint,
            feature_space_hash: space.fingerprint(),
            feature_space: space,
            cost_matrix,
            parameters,
        })
    }

    /// Pretty-printed JSON. Identical models give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses and checks a serialized model for internal consistency.
    pub fn from_json(input: &str) -> Result<Self> {
        let m: SentimentModel = serde_json::from_str(input).map_err(|e| Error::Model(e.to_string()))?;
        if m.format_version != FORMAT_VERSION {
            return Err(Error::Model(format!(
                "format version {} is not supported (expected {FORMAT_VERSION})",
                m.format_version
            )));
        }
        if m.model_kind != m.parameters.kind() {
            return Err(Error::Model("model_kind does not match parameters".into()));
        }
        if m.feature_space.fingerprint() != m.feature_space_hash {
            return Err(Error::Model("feature space hash does not match its columns".into()));
        }
        if m.parameters.dim() != m.feature_space.len() {
            return Err(Error::Model(format!(
                "classifier expects {} columns, feature space has {}",
                m.parameters.dim(),
                m.feature_space.len()
            )));
        }
        if config_hash(&m.pipeline_config, &m.lexicon_fingerprint) != m.config_hash {
            return Err(Error::Model("config hash does not match stored config".into()));
        }
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SentimentModel::from_json(&text)
    }

    /// Checks that `cfg` and `lexicon` are the ones the model was trained
    /// with.
    pub fn check_compatible(&self, cfg: &PipelineConfig, lexicon: &Lexicon) -> Result<()> {
        if lexicon.fingerprint() != self.lexicon_fingerprint {
            return Err(Error::ConfigMismatch("lexicon".into()));
        }
        if config_hash(cfg, &self.lexicon_fingerprint) != self.config_hash {
            return Err(Error::ConfigMismatch("preprocessing config".into()));
        }
        Ok(())
    }

    /// Predictor using the stored config and the given lexicon, which must
    /// match the training lexicon.
    pub fn predictor(self, lexicon: &Lexicon) -> Result<ModelPredictor> {
        let cfg = self.pipeline_config.clone();
        self.check_compatible(&cfg, lexicon)?;
        Ok(ModelPredictor {
            extractor: Extractor::new(cfg, lexicon.clone()),
            model: self,
        })
    }
}

/// A model with its feature extractor, ready to label text.
pub struct ModelPredictor {
    model: SentimentModel,
    extractor: Extractor,
}

impl ModelPredictor {
    pub fn model(&self) -> &SentimentModel {
        &self.model
    }

    pub fn vectorize(&self, text: &str) -> FeatureVector {
        self.model.feature_space.vectorize_with(text, &self.extractor)
    }

    pub fn predict_text(&self, text: &str) -> Result<Label> {
        self.model
            .parameters
            .predict(&self.vectorize(text), self.model.cost_matrix.as_ref())
    }
}

impl Predictor for ModelPredictor {
    fn predict(&self, doc: &Document) -> Result<Label> {
        self.predict_text(&doc.text)
    }
}

/// Trains a fresh [`SentimentModel`] per fold; the feature space and any
/// feature selection come from the fold's training documents only.
pub struct PipelineTrainer {
    pub lexicon: Lexicon,
    pub config: PipelineConfig,
    pub spec: TrainSpec,
}

impl Trainer for PipelineTrainer {
    type Model = ModelPredictor;

    fn fit(&self, train: &[&Document]) -> Result<ModelPredictor> {
        SentimentModel::train(train, &self.lexicon, &self.config, &self.spec)?.predictor(&self.lexicon)
    }
}
