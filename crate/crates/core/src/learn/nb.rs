use serde::{Deserialize, Serialize};

use super::{check_dim, check_training, class_counts, ClassScores};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Bernoulli naive Bayes over binary feature presence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    dim: usize,
    alpha: f64,
    classes: Vec<ClassModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ClassModel {
    label: Label,
    log_prior: f64,
    /// `ln P(x_j = 1 | c) - ln P(x_j = 0 | c)` per column.
    log_odds: Vec<f64>,
    /// `sum_j ln P(x_j = 0 | c)`.
    log_absent_total: f64,
}

impl NaiveBayesModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn labels(&self) -> Vec<Label> {
        self.classes.iter().map(|c| c.label).collect()
    }

    /// Unnormalized log joint `ln P(c) + sum_j ln P(x_j | c)` for every
    /// trained class.
    pub fn log_joint(&self, v: &FeatureVector) -> Result<Vec<(Label, f64)>> {
        check_dim(v, self.dim)?;
        Ok(self
            .classes
            .iter()
            .map(|c| {
                let present: f64 = v.entries().iter().map(|&(j, _)| c.log_odds[j]).sum();
                (c.label, c.log_prior + c.log_absent_total + present)
            })
            .collect())
    }
}

/// Trains Bernoulli naive Bayes with Laplace smoothing `alpha`:
/// `P(x_j = 1 | c) = (n_cj + alpha) / (n_c + 2 alpha)`. A column counts as
/// present when its value is nonzero.
pub fn train_nb(vectors: &[FeatureVector], labels: &[Label], dim: usize, alpha: f64) -> Result<NaiveBayesModel> {
    check_training(vectors, labels, dim)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("smoothing must be positive, got {alpha}")));
    }
    if vectors.is_empty() {
        return Err(Error::EmptyTrainingData);
    }
    let counts = class_counts(labels);
    let n = vectors.len() as f64;
    let mut present = vec![vec![0usize; dim]; 3];
    for (v, l) in vectors.iter().zip(labels) {
        for &(j, x) in v.entries() {
            if x != 0.0 {
                present[l.index()][j] += 1;
            }
        }
    }
    let classes = Label::ALL
        .into_iter()
        .filter(|l| counts[l.index()] > 0)
        .map(|label| {
            let nc = counts[label.index()] as f64;
            let denom = nc + 2.0 * alpha;
            let mut log_odds = Vec::with_capacity(dim);
            let mut log_absent_total = 0.0;
            for &k in &present[label.index()] {
                let p = (k as f64 + alpha) / denom;
                let q = (nc - k as f64 + alpha) / denom;
                log_odds.push(p.ln() - q.ln());
                log_absent_total += q.ln();
            }
            ClassModel {
                label,
                log_prior: (nc / n).ln(),
                log_odds,
                log_absent_total,
            }
        })
        .collect();
    Ok(NaiveBayesModel { dim, alpha, classes })
}

/// Most probable label and the posterior over all three labels (zero for
/// labels absent from training). Ties go to the earliest label.
pub fn predict_nb(model: &NaiveBayesModel, v: &FeatureVector) -> Result<(Label, ClassScores)> {
    let joint = model.log_joint(v)?;
    let max = joint.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = joint.iter().map(|&(_, s)| (s - max).exp()).sum();
    let mut posterior = [0.0; 3];
    let mut best = joint[0];
    for &(label, s) in &joint {
        posterior[label.index()] = (s - max).exp() / z;
        if s > best.1 {
            best = (label, s);
        }
    }
    Ok((best.0, posterior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(cols: &[usize]) -> FeatureVector {
        FeatureVector::from_pairs(cols.iter().map(|&c| (c, 1.0)).collect())
    }

    #[test]
    fn hand_computed_posterior() {
        // Two columns, alpha 1.
        // Positive: 2 docs, col0 in both, col1 in none.
        // Negative: 1 doc, col1 only.
        let vectors = vec![fv(&[0]), fv(&[0]), fv(&[1])];
        let labels = vec![Label::Positive, Label::Positive, Label::Negative];
        let m = train_nb(&vectors, &labels, 2, 1.0).unwrap();
        let (label, post) = predict_nb(&m, &fv(&[0])).unwrap();
        // P(pos) * P(x0=1|pos) * P(x1=0|pos) = 2/3 * 3/4 * 3/4
        // P(neg) * P(x0=1|neg) * P(x1=0|neg) = 1/3 * 1/3 * 1/3
        let jp = 2.0 / 3.0 * 0.75 * 0.75;
        let jn = 1.0 / 3.0 / 9.0;
        assert_eq!(label, Label::Positive);
        assert!((post[2] - jp / (jp + jn)).abs() < 1e-12);
        assert!((post[0] - jn / (jp + jn)).abs() < 1e-12);
        assert_eq!(post[1], 0.0);
    }

    #[test]
    fn dimension_checked() {
        let m = train_nb(&[fv(&[0])], &[Label::Neutral], 1, 1.0).unwrap();
        assert!(matches!(
            predict_nb(&m, &fv(&[3])),
            Err(Error::DimensionMismatch { column: 3, expected: 1 })
        ));
        assert!(train_nb(&[fv(&[0])], &[Label::Neutral], 1, 0.0).is_err());
        assert!(train_nb(&[], &[], 1, 1.0).is_err());
    }

    #[test]
    fn exact_tie_goes_to_earliest_label() {
        let vectors = vec![fv(&[0]), fv(&[0])];
        let labels = vec![Label::Positive, Label::Neutral];
        let m = train_nb(&vectors, &labels, 1, 1.0).unwrap();
        assert_eq!(predict_nb(&m, &fv(&[0])).unwrap().0, Label::Neutral);
    }

    proptest! {
        #[test]
        fn posterior_is_a_distribution(
            docs in prop::collection::vec((prop::collection::vec(0usize..6, 0..4), 0usize..3), 1..20),
            query in prop::collection::vec(0usize..6, 0..4),
        ) {
            let vectors: Vec<_> = docs.iter().map(|(c, _)| fv(c)).collect();
            let labels: Vec<_> = docs.iter().map(|&(_, l)| Label::ALL[l]).collect();
            let m = train_nb(&vectors, &labels, 6, 1.0).unwrap();
            let (label, post) = predict_nb(&m, &fv(&query)).unwrap();
            prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(post.iter().all(|p| (0.0..=1.0).contains(p)));
            prop_assert!(m.labels().contains(&label));
        }
    }
}
