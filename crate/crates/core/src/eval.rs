//! Confusion matrices, per-class metrics and stratified cross-validation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{stratified_folds, Dataset, Document, Label};
use crate::error::{Error, Result};

/// Counts indexed `[truth][predicted]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[usize; 3]; 3]);

impl ConfusionMatrix {
    pub fn from_pairs(pred: &[Label], gold: &[Label]) -> Result<Self> {
        if pred.len() != gold.len() {
            return Err(Error::LengthMismatch {
                pred: pred.len(),
                gold: gold.len(),
            });
        }
        let mut m = ConfusionMatrix::default();
        for (p, g) in pred.iter().zip(gold) {
            m.0[g.index()][p.index()] += 1;
        }
        Ok(m)
    }

    pub fn get(&self, truth: Label, predicted: Label) -> usize {
        self.0[truth.index()][predicted.index()]
    }

    pub fn total(&self) -> usize {
        self.0.iter().flatten().sum()
    }

    pub fn add(&mut self, other: &ConfusionMatrix) {
        for t in 0..3 {
            for p in 0..3 {
                self.0[t][p] += other.0[t][p];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold instances of the class.
    pub support: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl ClassMetrics {
    fn of(m: &ConfusionMatrix, label: Label) -> Self {
        let i = label.index();
        let tp = m.0[i][i];
        let predicted: usize = (0..3).map(|t| m.0[t][i]).sum();
        let support: usize = m.0[i].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            precision,
            recall,
            f1,
            support,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub negative: ClassMetrics,
    pub neutral: ClassMetrics,
    pub positive: ClassMetrics,
    pub macro_f1: f64,
    /// Mean of the positive and negative F1.
    pub semeval_f: f64,
}

impl EvaluationReport {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Self {
        let [negative, neutral, positive] = Label::ALL.map(|l| ClassMetrics::of(&confusion, l));
        let correct: usize = (0..3).map(|i| confusion.0[i][i]).sum();
        EvaluationReport {
            accuracy: ratio(correct, confusion.total()),
            macro_f1: (negative.f1 + neutral.f1 + positive.f1) / 3.0,
            semeval_f: (positive.f1 + negative.f1) / 2.0,
            negative,
            neutral,
            positive,
            confusion,
        }
    }

    pub fn class(&self, label: Label) -> &ClassMetrics {
        match label {
            Label::Negative => &self.negative,
            Label::Neutral => &self.neutral,
            Label::Positive => &self.positive,
        }
    }

    pub fn metric(&self, metric: Metric) -> f64 {
        match metric {
            Metric::SemevalF => self.semeval_f,
            Metric::Accuracy => self.accuracy,
            Metric::MacroF1 => self.macro_f1,
        }
    }
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>9} {:>9} {:>9} {:>8}", "class", "precision", "recall", "f1", "support")?;
        for label in Label::ALL {
            let c = self.class(label);
            writeln!(
                f,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
                label.as_str(),
                c.precision,
                c.recall,
                c.f1,
                c.support
            )?;
        }
        writeln!(f)?;
        writeln!(f, "accuracy   {:.4}", self.accuracy)?;
        writeln!(f, "macro-f1   {:.4}", self.macro_f1)?;
        writeln!(f, "semeval-f  {:.4}", self.semeval_f)?;
        writeln!(f)?;
        writeln!(f, "confusion (rows gold, columns predicted: negative neutral positive)")?;
        for (label, row) in Label::ALL.iter().zip(&self.confusion.0) {
            writeln!(f, "{:<10} {:>8} {:>8} {:>8}", label.as_str(), row[0], row[1], row[2])?;
        }
        Ok(())
    }
}

/// Scores predictions against gold labels.
pub fn evaluate(pred: &[Label], gold: &[Label]) -> Result<EvaluationReport> {
    if gold.is_empty() && pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(EvaluationReport::from_confusion(ConfusionMatrix::from_pairs(pred, gold)?))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    SemevalF,
    Accuracy,
    MacroF1,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::SemevalF => "semeval-f",
            Metric::Accuracy => "accuracy",
            Metric::MacroF1 => "macro-f1",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semeval-f" => Ok(Metric::SemevalF),
            "accuracy" => Ok(Metric::Accuracy),
            "macro-f1" => Ok(Metric::MacroF1),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Something that learns a [`Predictor`] from labeled documents.
pub trait Trainer {
    type Model: Predictor;

    fn fit(&self, train: &[&Document]) -> Result<Self::Model>;
}

pub trait Predictor {
    fn predict(&self, doc: &Document) -> Result<Label>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    /// Metrics over the predictions of all folds together.
    pub pooled: EvaluationReport,
    pub folds: Vec<EvaluationReport>,
    /// `(document index, predicted label)` for every labeled document.
    pub predictions: Vec<(usize, Label)>,
}

impl CvReport {
    pub fn fold_mean(&self, metric: Metric) -> f64 {
        self.folds.iter().map(|r| r.metric(metric)).sum::<f64>() / self.folds.len() as f64
    }
}

/// Stratified `k`-fold cross-validation. Each fold's model sees only that
/// fold's training documents; predictions are pooled across folds.
pub fn cross_validate<T: Trainer>(d: &Dataset, trainer: &T, k: usize, seed: u64) -> Result<CvReport> {
    if d.labeled_count() == 0 {
        return Err(Error::EmptyInput);
    }
    let docs = d.documents();
    let folds = stratified_folds(d, k, seed)?;
    let mut pooled = ConfusionMatrix::default();
    let mut reports = Vec::with_capacity(folds.len());
    let mut predictions = Vec::new();
    for fold in &folds {
        let train: Vec<&Document> = fold.train.iter().map(|&i| &docs[i]).collect();
        let model = trainer.fit(&train)?;
        let mut pred = Vec::with_capacity(fold.test.len());
        let mut gold = Vec::with_capacity(fold.test.len());
        for &i in &fold.test {
            let label = model.predict(&docs[i])?;
            pred.push(label);
            gold.push(docs[i].label.ok_or_else(|| Error::Unlabeled(docs[i].id.clone()))?);
            predictions.push((i, label));
        }
        let m = ConfusionMatrix::from_pairs(&pred, &gold)?;
        pooled.add(&m);
        reports.push(EvaluationReport::from_confusion(m));
    }
    predictions.sort_by_key(|&(i, _)| i);
    Ok(CvReport {
        pooled: EvaluationReport::from_confusion(pooled),
        folds: reports,
        predictions,
    })
}
