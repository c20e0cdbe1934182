//! Sentiment lexicons and the lexicon-based classifier.

mod auto;
mod classify;
pub mod kmeans;
mod score;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use auto::{generate_auto_lexicon, lexicon_from_stats, word_stats, WordStats, DEFAULT_MIN_OCCURRENCES};
pub use classify::{cluster_labels, lexicon_classify, score_documents, LexiconClassification};
pub use kmeans::{kmeans, KMeans};
pub use score::{score_avg, score_log, token_polarity, ScorePair};

/// Default merge priorities: emoticons win over the opinion lexicon, which
/// wins over induced entries.
pub const EMO_PRIORITY: i32 = 0;
pub const OPINION_PRIORITY: i32 = 1;
pub const AUTO_PRIORITY: i32 = 2;

const STARTER_EMO: &str = include_str!("../../data/emo.lex");

/// Term to polarity map. Terms are lowercase and polarities lie in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lexicon {
    name: String,
    priority: i32,
    entries: BTreeMap<String, f64>,
}

impl Lexicon {
    pub fn empty(name: impl Into<String>) -> Self {
        Lexicon {
            name: name.into(),
            priority: 0,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries<T: AsRef<str>>(
        name: impl Into<String>,
        priority: i32,
        entries: impl IntoIterator<Item = (T, f64)>,
    ) -> Result<Self> {
        let mut lex = Lexicon {
            name: name.into(),
            priority,
            entries: BTreeMap::new(),
        };
        for (term, polarity) in entries {
            lex.insert(term.as_ref(), polarity)?;
        }
        Ok(lex)
    }

    fn insert(&mut self, term: &str, polarity: f64) -> Result<()> {
        if !polarity.is_finite() || !(-1.0..=1.0).contains(&polarity) {
            return Err(Error::PolarityOutOfRange {
                term: term.to_string(),
                value: polarity,
            });
        }
        self.entries.insert(term.to_lowercase(), polarity);
        Ok(())
    }

    /// Small emoticon and slang lexicon bundled with the crate.
    pub fn starter_emo() -> Self {
        let mut lex = Lexicon::parse("emo", STARTER_EMO).expect("bundled lexicon is valid");
        lex.priority = EMO_PRIORITY;
        lex
    }

    /// Parses `term<TAB>polarity` lines. Blank lines are ignored.
    pub fn parse(name: impl Into<String>, input: &str) -> Result<Self> {
        let mut lex = Lexicon::empty(name);
        for (i, line) in input.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |reason: &str| Error::MalformedLine {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (term, value) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected `term<TAB>polarity`"))?;
            if term.is_empty() {
                return Err(malformed("empty term"));
            }
            let polarity: f64 = value
                .trim()
                .parse()
                .map_err(|_| malformed("polarity is not a number"))?;
            lex.insert(term, polarity)?;
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>, priority: i32) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map_or_else(|| "lexicon".to_string(), |s| s.to_string_lossy().into_owned());
        let mut lex = Lexicon::parse(name, &text)?;
        lex.priority = priority;
        Ok(lex)
    }

    /// Same format as [`Lexicon::parse`], sorted by term.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (term, polarity) in &self.entries {
            out.push_str(term);
            out.push('\t');
            out.push_str(&polarity.to_string());
            out.push('\n');
        }
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn priority(&self) -> i32 {
        self.priority
    }

    pub fn with_priority(mut self, priority: i32) -> Self {
        self.priority = priority;
        self
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.entries.get(term).copied()
    }

    /// Polarity of `term`, zero when absent.
    pub fn polarity(&self, term: &str) -> f64 {
        self.get(term).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(t, &p)| (t.as_str(), p))
    }

    /// Hex SHA-256 over the sorted entries. Names and priorities are ignored.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (term, polarity) in &self.entries {
            hasher.update(term.as_bytes());
            hasher.update([0]);
            hasher.update(polarity.to_bits().to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Unions lexicons. On a shared term the lexicon with the lowest priority
/// number wins; equal priorities resolve in list order. Returns `None` for an
/// empty list.
pub fn merge_lexicons(lexicons: &[Lexicon]) -> Option<Lexicon> {
    let mut order: Vec<&Lexicon> = lexicons.iter().collect();
    order.sort_by_key(|l| l.priority);
    let first = order.first()?;
    let mut merged = Lexicon {
        name: lexicons
            .iter()
            .map(|l| l.name.as_str())
            .collect::<Vec<_>>()
            .join("+"),
        priority: first.priority,
        entries: BTreeMap::new(),
    };
    for lex in order {
        for (term, &polarity) in &lex.entries {
            merged.entries.entry(term.clone()).or_insert(polarity);
        }
    }
    Some(merged)
}
