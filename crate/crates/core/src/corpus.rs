//! Dataset ingestion and stratified fold generation.
//!
//! Datasets are UTF-8 TSV files with one document per line:
//! `id <TAB> label <TAB> text`, where label is one of `positive`,
//! `negative`, `neutral`, or `?` for an unlabeled document.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentiment class. The derived ordering `Negative < Neutral < Positive` is
/// used for tie-breaking and for mapping clusters to labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Negative,
    Neutral,
    Positive,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Negative, Label::Neutral, Label::Positive];

    /// Dense index in `Label::ALL` order.
    pub fn index(self) -> usize {
        match self {
            Label::Negative => 0,
            Label::Neutral => 1,
            Label::Positive => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Negative => "negative",
            Label::Neutral => "neutral",
            Label::Positive => "positive",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" => Ok(Label::Negative),
            "neutral" => Ok(Label::Neutral),
            "positive" => Ok(Label::Positive),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Option<Label>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<Label>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

/// An ordered, immutable collection of documents with per-label tallies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    documents: Vec<Document>,
    counts: [usize; 3],
}

impl Dataset {
    /// Builds a dataset, checking that ids are non-empty and unique.
    pub fn new(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(documents.len());
        let mut counts = [0; 3];
        for (i, doc) in documents.iter().enumerate() {
            if doc.id.is_empty() {
                return Err(Error::MalformedLine {
                    line: i + 1,
                    reason: "empty document id".into(),
                });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: doc.id.clone(),
                    line: i + 1,
                });
            }
            if let Some(label) = doc.label {
                counts[label.index()] += 1;
            }
        }
        Ok(Dataset { documents, counts })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Number of documents carrying `label`. Unlabeled documents are not counted.
    pub fn count(&self, label: Label) -> usize {
        self.counts[label.index()]
    }

    pub fn labeled_count(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Parses the TSV format. Empty lines are skipped.
    pub fn parse_tsv(input: &str) -> Result<Self> {
        let mut documents = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in input.split('\n').enumerate() {
            if raw.is_empty() {
                continue;
            }
            let line = i + 1;
            let mut fields = raw.splitn(3, '\t');
            let (Some(id), Some(label), Some(text)) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(Error::MalformedLine {
                    line,
                    reason: "expected `id<TAB>label<TAB>text`".into(),
                });
            };
            if id.is_empty() {
                return Err(Error::MalformedLine {
                    line,
                    reason: "empty document id".into(),
                });
            }
            if !seen.insert(id) {
                return Err(Error::DuplicateId {
                    id: id.to_string(),
                    line,
                });
            }
            let label = match label {
                "?" => None,
                other => Some(other.parse::<Label>()?),
            };
            documents.push(Document::new(id, text, label));
        }
        Dataset::new(documents)
    }

    /// Serializes back to the TSV format, one LF-terminated line per document.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            out.push_str(&doc.id);
            out.push('\t');
            out.push_str(doc.label.map_or("?", Label::as_str));
            out.push('\t');
            out.push_str(&doc.text);
            out.push('\n');
        }
        out
    }

    /// Documents that carry a gold label, paired with it.
    pub fn labeled(&self) -> impl Iterator<Item = (&Document, Label)> {
        self.documents
            .iter()
            .filter_map(|d| d.label.map(|l| (d, l)))
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Dataset::parse_tsv(&text)
}

/// One cross-validation split. Indices refer to `Dataset::documents`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits the labeled documents into `k` stratified folds.
///
/// Each class is shuffled with a seeded RNG and dealt round-robin, so the
/// per-class counts of any two test folds differ by at most one. The deal for
/// each class continues where the previous class stopped, which also keeps
/// the fold sizes balanced.
pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidFoldCount(k));
    }
    let mut by_class: [Vec<usize>; 3] = Default::default();
    for (i, doc) in d.documents().iter().enumerate() {
        if let Some(label) = doc.label {
            by_class[label.index()].push(i);
        }
    }
    for label in Label::ALL {
        let count = by_class[label.index()].len();
        if count > 0 && count < k {
            return Err(Error::TooFewInstances {
                class: label,
                count,
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tests: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut next = 0;
    for members in by_class.iter_mut() {
        members.shuffle(&mut rng);
        for &idx in members.iter() {
            tests[next].push(idx);
            next = (next + 1) % k;
        }
    }

    let labeled: Vec<usize> = by_class.iter().flatten().copied().collect();
    Ok(tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let in_test: HashSet<usize> = test.iter().copied().collect();
            let mut train: Vec<usize> = labeled
                .iter()
                .copied()
                .filter(|i| !in_test.contains(i))
                .collect();
            train.sort_unstable();
            Fold { train, test }
        })
        .collect())
}
