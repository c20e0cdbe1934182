//! Feature space construction, vectorization and information-gain selection.
//!
//! A document becomes a sparse vector over two kinds of columns: binary
//! presence of n-grams seen in training, and a fixed set of hand-built
//! features (lexicon score, emoticon and negation counts, per-tag counts...).

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Document, Label};
use crate::error::{Error, Result};
use crate::lexicon::{score_avg, score_log, token_polarity, Lexicon};
use crate::preprocess::{ngrams, Analysis, NgramRange, PipelineConfig, PosTag, Preprocessor, NEG_EMO, POS_EMO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ManualFeature {
    /// Logarithmic lexicon score of the document.
    LexiconScore,
    /// Largest signed token polarity, zero without sentiment tokens.
    MaxScore,
    /// Smallest signed token polarity, zero without sentiment tokens.
    MinScore,
    ElongatedCount,
    HasPosEmoticon,
    HasNegEmoticon,
    /// +1 / -1 when the last token is a positive / negative emoticon.
    LastTokenEmoticonSign,
    /// Negation words with a non-empty scope.
    NegationCount,
    PosTagCount(PosTag),
    PunctuationCount,
    PosEmoticonCount,
    NegEmoticonCount,
    NegativeTokenCount,
    PositiveTokenCount,
}

impl ManualFeature {
    pub fn all() -> Vec<ManualFeature> {
        use ManualFeature::*;
        let mut v = vec![
            LexiconScore,
            MaxScore,
            MinScore,
            ElongatedCount,
            HasPosEmoticon,
            HasNegEmoticon,
            LastTokenEmoticonSign,
            NegationCount,
        ];
        v.extend(PosTag::ALL.into_iter().map(PosTagCount));
        v.extend([
            PunctuationCount,
            PosEmoticonCount,
            NegEmoticonCount,
            NegativeTokenCount,
            PositiveTokenCount,
        ]);
        v
    }
}

impl fmt::Display for ManualFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManualFeature::PosTagCount(tag) => write!(f, "PosTagCount[{tag}]"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    Ngram(String),
    Manual(ManualFeature),
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Column::Ngram(g) => f.write_str(g),
            Column::Manual(m) => m.fmt(f),
        }
    }
}

/// Sparse vector with strictly increasing column ids and no stored zeros.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(Vec<(usize, f64)>);

impl FeatureVector {
    /// Builds a vector from arbitrary pairs: sorts by column, drops zeros.
    /// Later duplicates overwrite earlier ones.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(c, _)| c);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (c, v) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == c => last.1 = v,
                _ => out.push((c, v)),
            }
        }
        out.retain(|&(_, v)| v != 0.0);
        FeatureVector(out)
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.0
    }

    pub fn get(&self, column: usize) -> f64 {
        self.0
            .binary_search_by_key(&column, |&(c, _)| c)
            .map_or(0.0, |i| self.0[i].1)
    }

    pub fn nnz(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_column(&self) -> Option<usize> {
        self.0.last().map(|&(c, _)| c)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.0.iter().map(|&(c, v)| dense[c] * v).sum()
    }
}

/// Preprocessor plus lexicon: everything needed to turn text into raw
/// features independent of any particular feature space.
#[derive(Debug, Clone)]
pub struct Extractor {
    pre: Preprocessor,
    lex: Lexicon,
}

/// Features of one document before column mapping.
#[derive(Debug, Clone, PartialEq)]
pub struct RawFeatures {
    /// Distinct n-grams in first-occurrence order.
    pub ngrams: Vec<String>,
    pub manual: Vec<(ManualFeature, f64)>,
}

impl Extractor {
    pub fn new(cfg: PipelineConfig, lex: Lexicon) -> Self {
        Extractor {
            pre: Preprocessor::new(cfg, &lex),
            lex,
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        self.pre.config()
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lex
    }

    pub fn analyze(&self, text: &str) -> Analysis {
        self.pre.analyze(text)
    }

    pub fn raw(&self, text: &str, range: NgramRange) -> RawFeatures {
        let analysis = self.pre.analyze(text);
        let mut seen = HashSet::new();
        let grams = ngrams(&analysis.kept, range)
            .into_iter()
            .filter(|g| seen.insert(g.clone()))
            .collect();
        RawFeatures {
            ngrams: grams,
            manual: manual_features(&analysis, &self.lex),
        }
    }
}

fn manual_features(a: &Analysis, lex: &Lexicon) -> Vec<(ManualFeature, f64)> {
    use ManualFeature::*;

    let polarities: Vec<f64> = a
        .kept
        .iter()
        .map(|t| token_polarity(t, lex))
        .filter(|&p| p != 0.0)
        .collect();
    let max = polarities.iter().copied().fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.max(p))));
    let min = polarities.iter().copied().fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.min(p))));
    let count = |pred: &dyn Fn(&crate::preprocess::Token) -> bool| {
        a.tokens.iter().filter(|t| pred(t)).count() as f64
    };
    let pos_emo = count(&|t| t.normalized == POS_EMO);
    let neg_emo = count(&|t| t.normalized == NEG_EMO);
    let last_sign = match a.tokens.last().map(|t| t.normalized.as_str()) {
        Some(POS_EMO) => 1.0,
        Some(NEG_EMO) => -1.0,
        _ => 0.0,
    };

    let mut out = vec![
        (LexiconScore, score_log(score_avg(&a.kept, lex))),
        (MaxScore, max.unwrap_or(0.0)),
        (MinScore, min.unwrap_or(0.0)),
        (ElongatedCount, count(&|t| t.is_elongated())),
        (HasPosEmoticon, f64::from(pos_emo > 0.0)),
        (HasNegEmoticon, f64::from(neg_emo > 0.0)),
        (LastTokenEmoticonSign, last_sign),
        (NegationCount, a.negated_contexts as f64),
    ];
    for tag in PosTag::ALL {
        out.push((PosTagCount(tag), count(&|t| t.tag == tag)));
    }
    out.extend([
        (PunctuationCount, count(&|t| t.is_punctuation())),
        (PosEmoticonCount, pos_emo),
        (NegEmoticonCount, neg_emo),
        (NegativeTokenCount, polarities.iter().filter(|&&p| p < 0.0).count() as f64),
        (PositiveTokenCount, polarities.iter().filter(|&&p| p > 0.0).count() as f64),
    ]);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpaceOptions {
    pub ngrams: NgramRange,
    /// Minimum number of training documents an n-gram must appear in.
    pub min_df: usize,
    pub manual_features: bool,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions {
            ngrams: NgramRange::unigrams(),
            min_df: 1,
            manual_features: true,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    ngrams: NgramRange,
    columns: Vec<Column>,
}

/// Ordered set of columns. Column ids are dense, `0..len()`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "SpaceRepr", into = "SpaceRepr")]
pub struct FeatureSpace {
    ngrams: NgramRange,
    columns: Vec<Column>,
    ngram_index: HashMap<String, usize>,
    manual_index: HashMap<ManualFeature, usize>,
}

impl PartialEq for FeatureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.ngrams == other.ngrams && self.columns == other.columns
    }
}

impl From<SpaceRepr> for FeatureSpace {
    fn from(r: SpaceRepr) -> Self {
        FeatureSpace::from_columns(r.ngrams, r.columns)
    }
}

impl From<FeatureSpace> for SpaceRepr {
    fn from(s: FeatureSpace) -> Self {
        SpaceRepr {
            ngrams: s.ngrams,
            columns: s.columns,
        }
    }
}

impl FeatureSpace {
    pub fn from_columns(ngrams: NgramRange, columns: Vec<Column>) -> Self {
        let mut ngram_index = HashMap::new();
        let mut manual_index = HashMap::new();
        for (i, c) in columns.iter().enumerate() {
            match c {
                Column::Ngram(g) => {
                    ngram_index.insert(g.clone(), i);
                }
                Column::Manual(m) => {
                    manual_index.insert(*m, i);
                }
            }
        }
        FeatureSpace {
            ngrams,
            columns,
            ngram_index,
            manual_index,
        }
    }

    /// Collects n-grams from `docs` (first-occurrence order) followed by the
    /// manual feature columns.
    pub fn build(docs: &[&Document], extractor: &Extractor, opts: &SpaceOptions) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        let mut order: Vec<String> = Vec::new();
        let mut df: HashMap<String, usize> = HashMap::new();
        for doc in docs {
            for g in extractor.raw(&doc.text, opts.ngrams).ngrams {
                let n = df.entry(g.clone()).or_insert(0);
                if *n == 0 {
                    order.push(g);
                }
                *n += 1;
            }
        }
        let mut columns: Vec<Column> = order
            .into_iter()
            .filter(|g| df[g] >= opts.min_df)
            .map(Column::Ngram)
            .collect();
        if opts.manual_features {
            columns.extend(ManualFeature::all().into_iter().map(Column::Manual));
        }
        Ok(FeatureSpace::from_columns(opts.ngrams, columns))
    }

    pub fn ngram_range(&self) -> NgramRange {
        self.ngrams
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column_of(&self, column: &Column) -> Option<usize> {
        match column {
            Column::Ngram(g) => self.ngram_index.get(g).copied(),
            Column::Manual(m) => self.manual_index.get(m).copied(),
        }
    }

    /// Maps raw features onto this space. Unknown n-grams are dropped.
    pub fn vectorize_raw(&self, raw: &RawFeatures) -> FeatureVector {
        let mut pairs: Vec<(usize, f64)> = raw
            .ngrams
            .iter()
            .filter_map(|g| self.ngram_index.get(g).map(|&c| (c, 1.0)))
            .collect();
        pairs.extend(
            raw.manual
                .iter()
                .filter_map(|(m, v)| self.manual_index.get(m).map(|&c| (c, *v))),
        );
        FeatureVector::from_pairs(pairs)
    }

    pub fn vectorize_with(&self, text: &str, extractor: &Extractor) -> FeatureVector {
        self.vectorize_raw(&extractor.raw(text, self.ngrams))
    }

    /// Re-expresses a vector of `source` in this space, which must be a
    /// column subset of `source`.
    pub fn project(&self, v: &FeatureVector, source: &FeatureSpace) -> FeatureVector {
        FeatureVector::from_pairs(
            v.entries()
                .iter()
                .filter_map(|&(c, x)| self.column_of(&source.columns[c]).map(|n| (n, x)))
                .collect(),
        )
    }

    /// Hex SHA-256 of the column list and n-gram range.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let repr = serde_json::to_vec(&(self.ngrams, &self.columns)).expect("serializable");
        hex::encode(Sha256::digest(repr))
    }
}

/// One-off vectorization. Prefer [`Extractor`] plus
/// [`FeatureSpace::vectorize_with`] when processing many documents.
pub fn vectorize(doc: &Document, space: &FeatureSpace, lex: &Lexicon, cfg: &PipelineConfig) -> FeatureVector {
    let extractor = Extractor::new(cfg.clone(), lex.clone());
    space.vectorize_with(&doc.text, &extractor)
}

/// Shannon entropy in bits of a class-count histogram.
pub fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Entropy reduction from splitting `parent` class counts into `present`
/// and the remainder. Never negative.
pub fn split_gain(parent: &[usize; 3], present: &[usize; 3]) -> f64 {
    let absent: [usize; 3] = std::array::from_fn(|i| parent[i] - present[i]);
    let n: usize = parent.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n_present: usize = present.iter().sum();
    let p_present = n_present as f64 / n as f64;
    let conditional = p_present * entropy(present) + (1.0 - p_present) * entropy(&absent);
    (entropy(parent) - conditional).max(0.0)
}

/// Information gain of every column's presence (value != 0) about the class.
pub fn information_gain(space: &FeatureSpace, vectors: &[FeatureVector], labels: &[Label]) -> Result<Vec<f64>> {
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            pred: vectors.len(),
            gold: labels.len(),
        });
    }
    let mut parent = [0usize; 3];
    for l in labels {
        parent[l.index()] += 1;
    }
    if parent.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleClassData);
    }
    let mut present = vec![[0usize; 3]; space.len()];
    for (v, l) in vectors.iter().zip(labels) {
        for &(c, _) in v.entries() {
            if c >= space.len() {
                return Err(Error::DimensionMismatch {
                    column: c,
                    expected: space.len(),
                });
            }
            present[c][l.index()] += 1;
        }
    }
    Ok(present.iter().map(|p| split_gain(&parent, p)).collect())
}

/// Columns with IG strictly above `threshold`, in their original order.
pub fn select_features(space: &FeatureSpace, ig: &[f64], threshold: f64) -> Result<FeatureSpace> {
    if !(threshold >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "selection threshold must be >= 0, got {threshold}"
        )));
    }
    if ig.len() != space.len() {
        return Err(Error::DimensionMismatch {
            column: ig.len(),
            expected: space.len(),
        });
    }
    let columns: Vec<Column> = space
        .columns
        .iter()
        .zip(ig)
        .filter(|(_, &g)| g > threshold)
        .map(|(c, _)| c.clone())
        .collect();
    if columns.is_empty() {
        return Err(Error::NoFeaturesSurvive { threshold });
    }
    Ok(FeatureSpace::from_columns(space.ngrams, columns))
}

/// `column_name<TAB>ig` lines, highest gain first.
pub fn ig_report(space: &FeatureSpace, ig: &[f64]) -> String {
    let mut order: Vec<usize> = (0..space.len().min(ig.len())).collect();
    order.sort_by(|&a, &b| ig[b].total_cmp(&ig[a]).then(a.cmp(&b)));
    let mut out = String::new();
    for c in order {
        out.push_str(&format!("{}\t{}\n", space.columns[c], ig[c]));
    }
    out
}
