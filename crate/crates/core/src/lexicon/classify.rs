use super::{kmeans, KMeans, Lexicon, ScorePair};
use crate::corpus::{Dataset, Label};
use crate::error::Result;
use crate::preprocess::{PipelineConfig, Preprocessor};

/// Output of the unsupervised lexicon classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconClassification {
    pub scores: Vec<ScorePair>,
    pub labels: Vec<Label>,
    /// Fraction of gold-labeled documents predicted correctly, if any have
    /// gold labels.
    pub accuracy: Option<f64>,
    pub clusters: KMeans,
}

/// Score pair of every document, in dataset order.
pub fn score_documents(d: &Dataset, lex: &Lexicon, cfg: &PipelineConfig) -> Vec<ScorePair> {
    let pre = Preprocessor::new(cfg.clone(), lex);
    d.documents()
        .iter()
        .map(|doc| ScorePair::of_tokens(&pre.analyze(&doc.text).kept, lex))
        .collect()
}

/// Label for each cluster.
///
/// With three occupied clusters, ascending centroid log score (then average
/// score) maps to negative, neutral, positive. With fewer occupied clusters
/// the ordering is ambiguous, so each cluster takes the sign of its
/// centroid's log score, zero meaning neutral.
pub fn cluster_labels(km: &KMeans) -> Vec<Label> {
    let sizes = km.cluster_sizes();
    let occupied: Vec<usize> = (0..km.centroids.len()).filter(|&j| sizes[j] > 0).collect();
    let by_sign = |c: &ScorePair| {
        if c.log > 0.0 {
            Label::Positive
        } else if c.log < 0.0 {
            Label::Negative
        } else {
            Label::Neutral
        }
    };
    let mut labels: Vec<Label> = km.centroids.iter().map(by_sign).collect();
    if occupied.len() == 3 {
        let mut order = occupied;
        order.sort_by(|&a, &b| {
            let (ca, cb) = (&km.centroids[a], &km.centroids[b]);
            ca.log
                .total_cmp(&cb.log)
                .then(ca.avg.total_cmp(&cb.avg))
                .then(a.cmp(&b))
        });
        for (j, label) in order.into_iter().zip(Label::ALL) {
            labels[j] = label;
        }
    }
    labels
}

/// Scores every document, clusters the score pairs into three groups and
/// labels the groups.
pub fn lexicon_classify(
    d: &Dataset,
    lex: &Lexicon,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<LexiconClassification> {
    let scores = score_documents(d, lex, cfg);
    let clusters = kmeans(&scores, 3, seed, 300)?;
    let cluster_label = cluster_labels(&clusters);
    let labels: Vec<Label> = clusters
        .assignments
        .iter()
        .map(|&c| cluster_label[c])
        .collect();

    let (mut correct, mut gold) = (0usize, 0usize);
    for (doc, predicted) in d.documents().iter().zip(&labels) {
        if let Some(truth) = doc.label {
            gold += 1;
            correct += usize::from(truth == *predicted);
        }
    }
    Ok(LexiconClassification {
        scores,
        labels,
        accuracy: (gold > 0).then(|| correct as f64 / gold as f64),
        clusters,
    })
}
