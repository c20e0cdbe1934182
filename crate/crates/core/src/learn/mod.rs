//! Classifiers over [`FeatureVector`]s and the cost-sensitive layer.
//!
//! All three classifiers handle the three sentiment classes; any class
//! absent from the training data is simply never predicted.

mod cost;
mod nb;
mod svm;
mod tree;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

pub use cost::{cost_sensitive_predict, labels_to_instance_weights, CostMatrix};
pub use nb::{predict_nb, train_nb, NaiveBayesModel};
pub use svm::{predict_svm, train_svm, Hyperplane, LinearSvmModel, PairModel, SvmParams};
pub use tree::{predict_tree, train_tree, DecisionTreeModel, Node, TreeParams};

/// Per-class values indexed by [`Label::index`].
pub type ClassScores = [f64; 3];

/// Label with the highest score, ties going to the earliest label in
/// `Negative < Neutral < Positive` order.
pub fn argmax_label(scores: &ClassScores) -> Label {
    let mut best = 0;
    for i in 1..3 {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Label::ALL[best]
}

pub(crate) fn check_dim(v: &FeatureVector, dim: usize) -> Result<()> {
    match v.max_column() {
        Some(c) if c >= dim => Err(Error::DimensionMismatch {
            column: c,
            expected: dim,
        }),
        _ => Ok(()),
    }
}

pub(crate) fn check_training(vectors: &[FeatureVector], labels: &[Label], dim: usize) -> Result<()> {
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            pred: vectors.len(),
            gold: labels.len(),
        });
    }
    for v in vectors {
        check_dim(v, dim)?;
    }
    Ok(())
}

pub(crate) fn class_counts(labels: &[Label]) -> [usize; 3] {
    let mut counts = [0; 3];
    for l in labels {
        counts[l.index()] += 1;
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Nb,
    Svm,
    Tree,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Nb => "nb",
            ClassifierKind::Svm => "svm",
            ClassifierKind::Tree => "tree",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nb" => Ok(ClassifierKind::Nb),
            "svm" => Ok(ClassifierKind::Svm),
            "tree" => Ok(ClassifierKind::Tree),
            other => Err(Error::InvalidParameter(format!("unknown classifier {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparameters {
    pub nb_alpha: f64,
    pub svm: SvmParams,
    pub tree: TreeParams,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            nb_alpha: 1.0,
            svm: SvmParams::default(),
            tree: TreeParams::default(),
        }
    }
}

/// A trained classifier of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classifier {
    Nb(NaiveBayesModel),
    Svm(LinearSvmModel),
    Tree(DecisionTreeModel),
}

impl Classifier {
    /// Trains a classifier. With a cost matrix, the SVM is trained on
    /// cost-derived instance weights; naive Bayes and the tree instead apply
    /// the matrix at prediction time (see [`Classifier::predict`]).
    pub fn train(
        kind: ClassifierKind,
        vectors: &[FeatureVector],
        labels: &[Label],
        dim: usize,
        hyper: &Hyperparameters,
        cost: Option<&CostMatrix>,
    ) -> Result<Self> {
        Ok(match kind {
            ClassifierKind::Nb => Classifier::Nb(train_nb(vectors, labels, dim, hyper.nb_alpha)?),
            ClassifierKind::Svm => {
                let weights = cost.map(|c| labels_to_instance_weights(labels, c));
                Classifier::Svm(train_svm(vectors, labels, dim, weights.as_deref(), &hyper.svm)?)
            }
            ClassifierKind::Tree => Classifier::Tree(train_tree(vectors, labels, dim, &hyper.tree)?),
        })
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            Classifier::Nb(_) => ClassifierKind::Nb,
            Classifier::Svm(_) => ClassifierKind::Svm,
            Classifier::Tree(_) => ClassifierKind::Tree,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Classifier::Nb(m) => m.dim(),
            Classifier::Svm(m) => m.dim(),
            Classifier::Tree(m) => m.dim(),
        }
    }

    /// Predicts a label. With a cost matrix, probabilistic models pick the
    /// label of least expected cost; the SVM already absorbed the costs in
    /// training and predicts as usual.
    pub fn predict(&self, v: &FeatureVector, cost: Option<&CostMatrix>) -> Result<Label> {
        match (self, cost) {
            (Classifier::Nb(m), None) => Ok(predict_nb(m, v)?.0),
            (Classifier::Nb(m), Some(c)) => cost_sensitive_predict(&predict_nb(m, v)?.1, c),
            (Classifier::Svm(m), _) => predict_svm(m, v),
            (Classifier::Tree(m), None) => predict_tree(m, v),
            (Classifier::Tree(m), Some(c)) => cost_sensitive_predict(&m.distribution(v)?, c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_ties_follow_label_order() {
        assert_eq!(argmax_label(&[0.2, 0.4, 0.4]), Label::Neutral);
        assert_eq!(argmax_label(&[0.5, 0.0, 0.5]), Label::Negative);
        assert_eq!(argmax_label(&[0.1, 0.2, 0.7]), Label::Positive);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("svm".parse::<ClassifierKind>().unwrap(), ClassifierKind::Svm);
        assert!("knn".parse::<ClassifierKind>().is_err());
    }
}
