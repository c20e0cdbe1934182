//! Lexicon induction from labeled documents.
//!
//! A term's positive score is the share of its positive-document occurrences
//! among its positive and negative occurrences. Terms whose positive score
//! falls in the neutral band `[0.4, 0.6]` are dropped and the survivors are
//! mapped to `2 * score - 1`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Lexicon, AUTO_PRIORITY};
use crate::corpus::{Dataset, Label};
use crate::error::{Error, Result};
use crate::preprocess::{PipelineConfig, Preprocessor};

pub const DEFAULT_MIN_OCCURRENCES: usize = 5;

/// Document counts of one term in positive and negative documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordStats {
    pub term: String,
    pub pos_count: usize,
    pub neg_count: usize,
}

impl WordStats {
    pub fn total(&self) -> usize {
        self.pos_count + self.neg_count
    }

    pub fn positive_score(&self) -> f64 {
        self.pos_count as f64 / self.total() as f64
    }

    pub fn negative_score(&self) -> f64 {
        self.neg_count as f64 / self.total() as f64
    }

    /// Positive score within `[0.4, 0.6]`, decided in integer arithmetic so
    /// the band edges are exact.
    pub fn is_neutral(&self) -> bool {
        let (pos, total) = (self.pos_count * 5, self.total());
        pos >= 2 * total && pos <= 3 * total
    }

    pub fn polarity(&self) -> f64 {
        2.0 * self.positive_score() - 1.0
    }
}

/// Counts, for every term, the positive and negative documents containing
/// it. Neutral and unlabeled documents are ignored; punctuation tokens and
/// negation words are not counted.
pub fn word_stats(d: &Dataset, cfg: &PipelineConfig) -> Result<Vec<WordStats>> {
    if d.count(Label::Positive) == 0 || d.count(Label::Negative) == 0 {
        return Err(Error::EmptyTrainingData);
    }
    let pre = Preprocessor::new(cfg.clone(), &Lexicon::empty("none"));
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (doc, label) in d.labeled() {
        if label == Label::Neutral {
            continue;
        }
        let terms: HashSet<String> = pre
            .analyze(&doc.text)
            .kept
            .into_iter()
            .filter(|t| !t.is_punctuation() && !cfg.negation_words.contains(&t.normalized))
            .map(|t| t.normalized)
            .collect();
        for term in terms {
            let entry = counts.entry(term).or_default();
            if label == Label::Positive {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|(term, (pos_count, neg_count))| WordStats {
            term,
            pos_count,
            neg_count,
        })
        .collect())
}

/// Applies the occurrence floor, the neutral band and the `[-1, 1]` remap.
pub fn lexicon_from_stats(stats: &[WordStats], min_occurrences: usize) -> Lexicon {
    let entries = stats
        .iter()
        .filter(|s| s.total() >= min_occurrences.max(1) && !s.is_neutral())
        .map(|s| (s.term.as_str(), s.polarity()));
    Lexicon::from_entries("auto", AUTO_PRIORITY, entries).expect("remapped scores lie in [-1, 1]")
}

pub fn generate_auto_lexicon(
    d: &Dataset,
    cfg: &PipelineConfig,
    min_occurrences: usize,
) -> Result<Lexicon> {
    Ok(lexicon_from_stats(&word_stats(d, cfg)?, min_occurrences))
}
