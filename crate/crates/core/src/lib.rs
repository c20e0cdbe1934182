//! Sentiment classification for short social-media texts.
//!
//! Three approaches share one preprocessing pipeline:
//!
//! - lexicon scoring: average token polarity, its logarithmic rescaling, and
//!   unsupervised three-way labelling of the two scores with k-means
//!   ([`lexicon`]);
//! - supervised classifiers (Bernoulli naive Bayes, pairwise linear SVM,
//!   decision tree) over binary n-gram presence plus hand-built features
//!   ([`features`], [`learn`]);
//! - the combination of both, where the lexicon score enters the classifier
//!   as a feature.
//!
//! [`pipeline`] ties the pieces into trainable, serializable models and
//! [`eval`] scores them.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod learn;
pub mod lexicon;
pub mod pipeline;
pub mod preprocess;

pub use corpus::{Dataset, Document, Label};
pub use error::{Error, Result};
pub use lexicon::Lexicon;
pub use preprocess::PipelineConfig;
