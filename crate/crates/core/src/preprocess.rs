//! Text normalization, tweet-aware tokenization, negation scope marking,
//! but-clause detection, token filtering and n-gram extraction.
//!
//! The stages compose in this order:
//!
//! ```text
//! normalize -> tokenize -> mark_negation -> apply_but_clause -> filter_tokens -> ngrams
//! ```
//!
//! [`Preprocessor`] runs the whole chain for one document.

use std::borrow::Cow;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;

pub const POS_EMO: &str = "pos_emo";
pub const NEG_EMO: &str = "neg_emo";
pub const NEG_SUFFIX: &str = "_NEG";

/// Coarse Twitter part-of-speech tags. Serialized with the tagger's
/// one-character codes; anything unrecognized becomes `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PosTag {
    #[serde(rename = "N")]
    N,
    #[serde(rename = "V")]
    V,
    #[serde(rename = "A")]
    A,
    #[serde(rename = "R")]
    R,
    #[serde(rename = "!")]
    Bang,
    #[serde(rename = "E")]
    E,
    #[serde(rename = "G")]
    G,
    #[serde(rename = "@")]
    AtMention,
    #[serde(rename = "#")]
    Hashtag,
    #[serde(rename = "U")]
    U,
    #[serde(rename = "~")]
    Tilde,
    #[serde(rename = "O")]
    O,
    #[serde(rename = "P")]
    P,
    #[serde(rename = "D")]
    D,
    #[serde(rename = "^")]
    Caret,
    #[serde(rename = "other")]
    Other,
}

impl PosTag {
    pub const ALL: [PosTag; 16] = [
        PosTag::N,
        PosTag::V,
        PosTag::A,
        PosTag::R,
        PosTag::Bang,
        PosTag::E,
        PosTag::G,
        PosTag::AtMention,
        PosTag::Hashtag,
        PosTag::U,
        PosTag::Tilde,
        PosTag::O,
        PosTag::P,
        PosTag::D,
        PosTag::Caret,
        PosTag::Other,
    ];

    pub fn code(self) -> &'static str {
        match self {
            PosTag::N => "N",
            PosTag::V => "V",
            PosTag::A => "A",
            PosTag::R => "R",
            PosTag::Bang => "!",
            PosTag::E => "E",
            PosTag::G => "G",
            PosTag::AtMention => "@",
            PosTag::Hashtag => "#",
            PosTag::U => "U",
            PosTag::Tilde => "~",
            PosTag::O => "O",
            PosTag::P => "P",
            PosTag::D => "D",
            PosTag::Caret => "^",
            PosTag::Other => "other",
        }
    }

    /// Tag for a tagger code. Codes outside the enumeration map to `Other`.
    pub fn from_code(code: &str) -> PosTag {
        PosTag::ALL
            .into_iter()
            .find(|t| t.code() == code)
            .unwrap_or(PosTag::Other)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for PosTag {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(PosTag::from_code(s))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub surface: String,
    /// Lowercased surface, or `pos_emo` / `neg_emo` for replaced emoticons.
    pub normalized: String,
    pub tag: PosTag,
    /// Inside the scope of a negation word.
    pub negated: bool,
    /// After a contrastive but-phrase.
    pub flipped: bool,
    pub position: usize,
}

impl Token {
    pub fn new(surface: impl Into<String>, tag: PosTag, position: usize) -> Self {
        let surface = surface.into();
        Token {
            normalized: surface.to_lowercase(),
            surface,
            tag,
            negated: false,
            flipped: false,
            position,
        }
    }

    pub fn is_replaced_emoticon(&self) -> bool {
        self.normalized == POS_EMO || self.normalized == NEG_EMO
    }

    /// Key used for lexicon lookups. Replaced emoticons are looked up by
    /// their original glyph so their polarity survives the renaming.
    pub fn lexicon_key(&self) -> Cow<'_, str> {
        if self.is_replaced_emoticon() {
            Cow::Owned(self.surface.to_lowercase())
        } else {
            Cow::Borrowed(&self.normalized)
        }
    }

    /// Form used as an n-gram feature: `_NEG` appended inside negation scope.
    pub fn feature_form(&self) -> Cow<'_, str> {
        if self.negated {
            Cow::Owned(format!("{}{NEG_SUFFIX}", self.normalized))
        } else {
            Cow::Borrowed(&self.normalized)
        }
    }

    /// True when every character is punctuation. Emoticons are not
    /// punctuation.
    pub fn is_punctuation(&self) -> bool {
        self.tag != PosTag::E
            && !self.surface.is_empty()
            && self.surface.chars().all(is_punct_char)
    }

    /// True when some character repeats at least three times in a row.
    pub fn is_elongated(&self) -> bool {
        if self.is_replaced_emoticon() || self.tag == PosTag::E {
            return false;
        }
        let mut run = 0;
        let mut prev = None;
        for c in self.normalized.chars() {
            if Some(c) == prev {
                run += 1;
                if run >= 3 {
                    return true;
                }
            } else {
                prev = Some(c);
                run = 1;
            }
        }
        false
    }
}

fn is_punct_char(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '…' | '“' | '”' | '‘' | '’' | '¡' | '¿' | '«' | '»')
}

fn default_negation_words() -> BTreeSet<String> {
    [
        // Contracted and lexical negators.
        "hardly", "lack", "lacking", "lacks", "neither", "nor", "cannot", "daren't", "don't",
        "doesn't", "didn't", "hadn't", "shouldn't", "wasn't", "wouldn't", "weren't", "won't",
        "without", "doesnt", "didnt", "hadnt", "hasn't", "havn't", "haven't",
        // Plain negators.
        "no", "not",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

fn strings(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Tunable behaviour of the preprocessing chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub stop_words: BTreeSet<String>,
    pub negation_words: BTreeSet<String>,
    pub negation_exception_phrases: BTreeSet<String>,
    pub but_phrases: BTreeSet<String>,
    pub clause_punctuation: BTreeSet<String>,
    pub allowed_tags: BTreeSet<PosTag>,
    /// Remove URLs, @-mentions, hashtags and retweet markers.
    pub strip_syntax: bool,
    pub apply_pos_filter: bool,
    /// Apply but-clause polarity flips when scoring.
    pub flip_but_clauses: bool,
    /// Input text is `token/TAG` pairs instead of raw text.
    pub pretagged: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            stop_words: strings(&["a", "an", "the", "is", "at", "which", "on"]),
            negation_words: default_negation_words(),
            negation_exception_phrases: strings(&[
                "not only",
                "not just",
                "no question",
                "not to mention",
                "no wonder",
            ]),
            but_phrases: strings(&["but", "with the exception of", "except that", "except for"]),
            clause_punctuation: strings(&[".", ",", "!", "?", ":", ";"]),
            allowed_tags: [
                PosTag::N,
                PosTag::V,
                PosTag::A,
                PosTag::R,
                PosTag::Bang,
                PosTag::E,
                PosTag::G,
            ]
            .into_iter()
            .collect(),
            strip_syntax: true,
            apply_pos_filter: true,
            flip_but_clauses: false,
            pretagged: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.clause_punctuation.is_empty() {
            return Err(Error::InvalidParameter(
                "clause_punctuation must not be empty".into(),
            ));
        }
        let sets = [
            ("stop_words", &self.stop_words),
            ("negation_words", &self.negation_words),
            ("negation_exception_phrases", &self.negation_exception_phrases),
            ("but_phrases", &self.but_phrases),
        ];
        for (name, set) in sets {
            if let Some(bad) = set.iter().find(|w| w.to_lowercase() != **w) {
                return Err(Error::InvalidParameter(format!(
                    "{name} entry {bad:?} is not lowercase"
                )));
            }
        }
        Ok(())
    }

    /// Reads a stop-word list, one word per line.
    pub fn stop_words_from_str(list: &str) -> BTreeSet<String> {
        list.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect()
    }
}

static URL: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S+").unwrap());
static RETWEET: Lazy<Regex> = Lazy::new(|| Regex::new(r"\bRT\b:?").unwrap());
static MENTION_OR_TAG: Lazy<Regex> = Lazy::new(|| Regex::new(r"[@#]\w+:?").unwrap());
static EMOTICON: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r#"^(?:[<>]?[:;=8xX][\-o*'^]?[)\](\[dDpP/\\:}{@|3oO]+|[)\](\[dDpP/\\:}{@|]+[\-o*'^]?[:;=8][<>]?|<3|[xX]-?[dD]|[tT]_[tT]|\^_\^)$"#,
    )
    .unwrap()
});
static URL_TOKEN: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)^(?:https?://|www\.)\S+$").unwrap());
static WORD_SHAPE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^[\p{Alphabetic}\p{N}]+(?:[-'_][\p{Alphabetic}\p{N}]+)*$").unwrap());

/// Lowercases and cleans raw text.
///
/// With `strip_syntax` set, URLs, `@name`, `#tag` and retweet markers are
/// removed first. Whitespace-separated chunks that look like emoticons keep
/// their original case.
pub fn normalize(text: &str, cfg: &PipelineConfig) -> String {
    let text = text.replace(['’', '‘'], "'");
    let text: Cow<'_, str> = if cfg.strip_syntax {
        let t = URL.replace_all(&text, " ");
        let t = RETWEET.replace_all(&t, " ");
        let t = MENTION_OR_TAG.replace_all(&t, " ");
        Cow::Owned(t.into_owned())
    } else {
        Cow::Borrowed(&text)
    };
    let mut out = String::with_capacity(text.len());
    for chunk in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        if EMOTICON.is_match(chunk) {
            out.push_str(chunk);
        } else {
            out.push_str(&chunk.to_lowercase());
        }
    }
    out
}

/// Splits text into tokens, keeping emoticons from a lexicon whole.
///
/// Construct once per lexicon and reuse; building the glyph table scans the
/// whole lexicon.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    /// Non-word lexicon entries (emoticons), longest first.
    glyphs: Vec<(String, f64)>,
}

impl Tokenizer {
    pub fn new(emo: &Lexicon) -> Self {
        let mut glyphs: Vec<(String, f64)> = emo
            .iter()
            .filter(|(term, _)| !term.contains(char::is_whitespace) && !WORD_SHAPE.is_match(term))
            .map(|(t, p)| (t.to_string(), p))
            .collect();
        glyphs.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        Tokenizer { glyphs }
    }

    fn glyph_at(&self, chunk: &str, at: usize) -> Option<&(String, f64)> {
        let rest = &chunk.as_bytes()[at..];
        self.glyphs
            .iter()
            .find(|(g, _)| rest.len() >= g.len() && rest[..g.len()].eq_ignore_ascii_case(g.as_bytes()))
    }

    fn glyph_exact(&self, word: &str) -> Option<&(String, f64)> {
        self.glyphs.iter().find(|(g, _)| g.eq_ignore_ascii_case(word))
    }

    fn emoticon_token(surface: &str, polarity: f64, position: usize) -> Token {
        let mut t = Token::new(surface, PosTag::E, position);
        if polarity > 0.0 {
            t.normalized = POS_EMO.into();
        } else if polarity < 0.0 {
            t.normalized = NEG_EMO.into();
        }
        t
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        for chunk in text.split_whitespace() {
            if URL_TOKEN.is_match(chunk) {
                tokens.push(Token::new(chunk, PosTag::U, tokens.len()));
                continue;
            }
            let mut chars = chunk.chars();
            if let (Some(first @ ('@' | '#')), Some(second)) = (chars.next(), chars.next()) {
                if second.is_alphanumeric() || second == '_' {
                    let tag = if first == '@' {
                        PosTag::AtMention
                    } else {
                        PosTag::Hashtag
                    };
                    tokens.push(Token::new(chunk, tag, tokens.len()));
                    continue;
                }
            }

            let mut segment_start = 0;
            let mut at = 0;
            while at < chunk.len() {
                if let Some((glyph, polarity)) = self.glyph_at(chunk, at) {
                    push_word_segment(&mut tokens, &chunk[segment_start..at]);
                    let end = at + glyph.len();
                    tokens.push(Self::emoticon_token(&chunk[at..end], *polarity, tokens.len()));
                    at = end;
                    segment_start = end;
                } else {
                    at += chunk[at..].chars().next().map_or(1, char::len_utf8);
                }
            }
            push_word_segment(&mut tokens, &chunk[segment_start..]);
        }
        tokens
    }

    /// Tokens from `token/TAG` pairs. The tagger's tokenization is kept
    /// as-is; only emoticon replacement and syntax stripping apply.
    pub fn tokenize_tagged(&self, line: &str, cfg: &PipelineConfig) -> Vec<Token> {
        let mut tokens = Vec::new();
        for (word, tag) in parse_tagged(line) {
            if cfg.strip_syntax
                && (matches!(tag, PosTag::U | PosTag::AtMention | PosTag::Hashtag | PosTag::Tilde)
                    || word == "RT")
            {
                continue;
            }
            let token = match self.glyph_exact(word) {
                Some((_, polarity)) => {
                    let mut t = Self::emoticon_token(word, *polarity, tokens.len());
                    t.tag = tag;
                    t
                }
                None => Token::new(word, tag, tokens.len()),
            };
            tokens.push(token);
        }
        tokens
    }
}

/// Emits leading punctuation, the word body, then trailing punctuation.
/// Punctuation inside the word (apostrophes, hyphens) stays attached.
fn push_word_segment(tokens: &mut Vec<Token>, segment: &str) {
    if segment.is_empty() {
        return;
    }
    let body_start = segment
        .char_indices()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, _)| i);
    let Some(body_start) = body_start else {
        for c in segment.chars() {
            tokens.push(Token::new(c.to_string(), PosTag::Other, tokens.len()));
        }
        return;
    };
    let body_end = segment
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_alphanumeric())
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(segment.len());
    for c in segment[..body_start].chars() {
        tokens.push(Token::new(c.to_string(), PosTag::Other, tokens.len()));
    }
    tokens.push(Token::new(&segment[body_start..body_end], PosTag::Other, tokens.len()));
    for c in segment[body_end..].chars() {
        tokens.push(Token::new(c.to_string(), PosTag::Other, tokens.len()));
    }
}

/// Convenience wrapper building a one-off [`Tokenizer`].
pub fn tokenize(text: &str, emo: &Lexicon) -> Vec<Token> {
    Tokenizer::new(emo).tokenize(text)
}

/// Parses `token/TAG` pairs. The tag is taken after the last `/`, so tokens
/// such as URLs may themselves contain slashes. A pair without a slash is
/// left untagged.
pub fn parse_tagged(line: &str) -> Vec<(&str, PosTag)> {
    line.split_whitespace()
        .map(|pair| match pair.rsplit_once('/') {
            Some((word, tag)) if !word.is_empty() => (word, PosTag::from_code(tag)),
            _ => (pair, PosTag::Other),
        })
        .collect()
}

fn phrase_at(tokens: &[Token], at: usize, phrase: &str) -> Option<usize> {
    let mut len = 0;
    for word in phrase.split_whitespace() {
        match tokens.get(at + len) {
            Some(t) if t.normalized == word => len += 1,
            _ => return None,
        }
    }
    (len > 0).then_some(len)
}

fn longest_phrase_at<'a>(
    tokens: &[Token],
    at: usize,
    phrases: impl IntoIterator<Item = &'a String>,
) -> Option<usize> {
    phrases
        .into_iter()
        .filter_map(|p| phrase_at(tokens, at, p))
        .max()
}

/// A negation word and the span of tokens it reverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegationScope {
    pub trigger: usize,
    /// Half-open token range after the trigger, ending before the next
    /// clause punctuation token or at the end of the document.
    pub start: usize,
    pub end: usize,
}

/// Finds the negation triggers that have a scope, honouring the exception
/// phrases and the rhetorical-question rule.
pub fn negation_scopes(tokens: &[Token], cfg: &PipelineConfig) -> Vec<NegationScope> {
    let is_negation = |t: &Token| cfg.negation_words.contains(&t.normalized);

    let is_question = tokens.last().is_some_and(|t| t.normalized == "?");
    if is_question && tokens.iter().take(3).any(is_negation) {
        return Vec::new();
    }

    let mut scopes = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        if !is_negation(tok) {
            continue;
        }
        if longest_phrase_at(tokens, i, &cfg.negation_exception_phrases).is_some() {
            continue;
        }
        let end = tokens[i + 1..]
            .iter()
            .position(|t| cfg.clause_punctuation.contains(&t.normalized))
            .map_or(tokens.len(), |p| i + 1 + p);
        scopes.push(NegationScope {
            trigger: i,
            start: i + 1,
            end,
        });
    }
    scopes
}

/// Number of negation triggers whose scope contains at least one token
/// other than a negation word.
pub fn negated_context_count(tokens: &[Token], cfg: &PipelineConfig) -> usize {
    negation_scopes(tokens, cfg)
        .iter()
        .filter(|s| {
            tokens[s.start..s.end]
                .iter()
                .any(|t| !cfg.negation_words.contains(&t.normalized))
        })
        .count()
}

/// Sets `negated` on every token inside a negation scope. Negation words
/// themselves are never marked.
pub fn mark_negation(mut tokens: Vec<Token>, cfg: &PipelineConfig) -> Vec<Token> {
    for scope in negation_scopes(&tokens, cfg) {
        for t in &mut tokens[scope.start..scope.end] {
            if !cfg.negation_words.contains(&t.normalized) {
                t.negated = true;
            }
        }
    }
    tokens
}

const NOT_ONLY: &str = "not only";

/// Sets `flipped` on every token after the first contrastive but-phrase.
///
/// Each earlier "not only" cancels the next but-phrase, which then reads as
/// "not only ... but also" rather than a contrast.
pub fn apply_but_clause(mut tokens: Vec<Token>, cfg: &PipelineConfig) -> Vec<Token> {
    let mut pending_not_only = 0usize;
    let mut i = 0;
    while i < tokens.len() {
        if let Some(len) = phrase_at(&tokens, i, NOT_ONLY) {
            pending_not_only += 1;
            i += len;
            continue;
        }
        if let Some(len) = longest_phrase_at(&tokens, i, &cfg.but_phrases) {
            if pending_not_only > 0 {
                pending_not_only -= 1;
                i += len;
                continue;
            }
            for t in &mut tokens[i + len..] {
                t.flipped = true;
            }
            break;
        }
        i += 1;
    }
    tokens
}

/// Drops stop words and, when enabled, tokens whose tag is not allowed.
/// Untagged (`Other`) tokens always pass the tag filter.
pub fn filter_tokens(tokens: Vec<Token>, cfg: &PipelineConfig) -> Vec<Token> {
    tokens
        .into_iter()
        .filter(|t| !cfg.stop_words.contains(&t.normalized))
        .filter(|t| {
            !cfg.apply_pos_filter || t.tag == PosTag::Other || cfg.allowed_tags.contains(&t.tag)
        })
        .collect()
}

/// Inclusive n-gram length range with `1 <= min <= max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "(usize, usize)", into = "(usize, usize)")]
pub struct NgramRange {
    min: usize,
    max: usize,
}

impl NgramRange {
    pub fn new(min: usize, max: usize) -> Result<Self> {
        if min == 0 || min > max {
            return Err(Error::InvalidParameter(format!(
                "n-gram range {min}..{max} must satisfy 1 <= min <= max"
            )));
        }
        Ok(NgramRange { min, max })
    }

    pub fn unigrams() -> Self {
        NgramRange { min: 1, max: 1 }
    }

    pub fn min(self) -> usize {
        self.min
    }

    pub fn max(self) -> usize {
        self.max
    }
}

impl Default for NgramRange {
    fn default() -> Self {
        NgramRange::unigrams()
    }
}

impl TryFrom<(usize, usize)> for NgramRange {
    type Error = Error;

    fn try_from((min, max): (usize, usize)) -> Result<Self> {
        NgramRange::new(min, max)
    }
}

impl From<NgramRange> for (usize, usize) {
    fn from(r: NgramRange) -> Self {
        (r.min, r.max)
    }
}

impl FromStr for NgramRange {
    type Err = Error;

    /// Accepts `2` or `1..2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad n-gram range {s:?}"));
        let (lo, hi) = s.split_once("..").unwrap_or((s, s));
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        NgramRange::new(lo, hi)
    }
}

impl fmt::Display for NgramRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.min, self.max)
    }
}

/// Contiguous n-grams of feature forms, all unigrams first, then bigrams, ...
pub fn ngrams(tokens: &[Token], range: NgramRange) -> Vec<String> {
    let forms: Vec<Cow<'_, str>> = tokens.iter().map(Token::feature_form).collect();
    let mut out = Vec::new();
    for n in range.min..=range.max {
        for window in forms.windows(n) {
            out.push(window.join(" "));
        }
    }
    out
}

/// Tokens of one document before and after filtering.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analysis {
    /// All tokens with negation (and, if enabled, but-clause) flags set.
    pub tokens: Vec<Token>,
    /// `tokens` after stop-word and tag filtering.
    pub kept: Vec<Token>,
    pub negated_contexts: usize,
}

/// Runs the full preprocessing chain with a fixed config and lexicon.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    cfg: PipelineConfig,
    tokenizer: Tokenizer,
}

impl Preprocessor {
    pub fn new(cfg: PipelineConfig, emo: &Lexicon) -> Self {
        Preprocessor {
            tokenizer: Tokenizer::new(emo),
            cfg,
        }
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn tokens(&self, text: &str) -> Vec<Token> {
        if self.cfg.pretagged {
            self.tokenizer.tokenize_tagged(text, &self.cfg)
        } else {
            self.tokenizer.tokenize(&normalize(text, &self.cfg))
        }
    }

    pub fn analyze(&self, text: &str) -> Analysis {
        let tokens = self.tokens(text);
        let negated_contexts = negated_context_count(&tokens, &self.cfg);
        let mut tokens = mark_negation(tokens, &self.cfg);
        if self.cfg.flip_but_clauses {
            tokens = apply_but_clause(tokens, &self.cfg);
        }
        let kept = filter_tokens(tokens.clone(), &self.cfg);
        Analysis {
            tokens,
            kept,
            negated_contexts,
        }
    }
}
