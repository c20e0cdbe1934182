use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_dim, check_training, class_counts};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// Regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-4,
            epochs: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl Hyperplane {
    pub fn decision(&self, v: &FeatureVector) -> f64 {
        v.dot(&self.weights) + self.bias
    }
}

/// One-vs-one machine: positive decisions vote for `first`, negative ones
/// for `second`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairModel {
    pub first: Label,
    pub second: Label,
    pub plane: Hyperplane,
    /// Primal objective of the kept plane after each epoch; the plane kept
    /// is the best end-of-epoch iterate so far, so this never increases.
    pub objective: Vec<f64>,
}

/// Pairwise linear SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvmModel {
    dim: usize,
    params: SvmParams,
    pairs: Vec<PairModel>,
}

const PAIRS: [(Label, Label); 3] = [
    (Label::Positive, Label::Negative),
    (Label::Neutral, Label::Negative),
    (Label::Positive, Label::Neutral),
];

impl LinearSvmModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    pub fn pairs(&self) -> &[PairModel] {
        &self.pairs
    }

    /// Decision value of every pairwise machine.
    pub fn decisions(&self, v: &FeatureVector) -> Result<Vec<(Label, Label, f64)>> {
        check_dim(v, self.dim)?;
        Ok(self
            .pairs
            .iter()
            .map(|p| (p.first, p.second, p.plane.decision(v)))
            .collect())
    }
}

fn objective(plane: &Hyperplane, data: &[(&FeatureVector, f64, f64)], lambda: f64) -> f64 {
    let norm: f64 = plane.weights.iter().map(|w| w * w).sum::<f64>() + plane.bias * plane.bias;
    let loss: f64 = data
        .iter()
        .map(|&(x, y, c)| c * (1.0 - y * plane.decision(x)).max(0.0))
        .sum();
    0.5 * lambda * norm + loss / data.len() as f64
}

/// Pegasos stochastic subgradient descent on `(x, y, weight)` examples with
/// `y` in {-1, +1}. The bias is learned as the weight of an implicit constant
/// feature. The returned plane is the end-of-epoch iterate with the lowest
/// objective; the history records that running minimum.
fn pegasos(data: &[(&FeatureVector, f64, f64)], dim: usize, params: &SvmParams, rng: &mut ChaCha8Rng) -> (Hyperplane, Vec<f64>) {
    // w = scale * v keeps the shrink step O(1).
    let mut v = vec![0.0; dim];
    let mut vb = 0.0;
    let mut scale = 1.0;
    let mut t = 0usize;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut best: Option<(f64, Hyperplane)> = None;
    let mut history = Vec::with_capacity(params.epochs);

    for _ in 0..params.epochs {
        order.shuffle(rng);
        for &i in &order {
            let (x, y, c) = data[i];
            t += 1;
            let eta = 1.0 / (params.lambda * t as f64);
            let margin = y * scale * (x.dot(&v) + vb);
            scale *= 1.0 - eta * params.lambda;
            if scale == 0.0 {
                v.iter_mut().for_each(|w| *w = 0.0);
                vb = 0.0;
                scale = 1.0;
            } else if scale < 1e-9 {
                v.iter_mut().for_each(|w| *w *= scale);
                vb *= scale;
                scale = 1.0;
            }
            if margin < 1.0 {
                let step = eta * c * y / scale;
                for &(j, xj) in x.entries() {
                    v[j] += step * xj;
                }
                vb += step;
            }
        }
        let plane = Hyperplane {
            weights: v.iter().map(|w| w * scale).collect(),
            bias: vb * scale,
        };
        let obj = objective(&plane, data, params.lambda);
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, plane));
        }
        history.push(best.as_ref().map_or(obj, |(b, _)| *b));
    }
    let plane = best.map(|(_, p)| p).unwrap_or(Hyperplane {
        weights: vec![0.0; dim],
        bias: 0.0,
    });
    (plane, history)
}

/// Trains one machine per pair of classes present in the data. `weights`
/// scales each example's hinge loss.
pub fn train_svm(
    vectors: &[FeatureVector],
    labels: &[Label],
    dim: usize,
    weights: Option<&[f64]>,
    params: &SvmParams,
) -> Result<LinearSvmModel> {
    check_training(vectors, labels, dim)?;
    if !(params.lambda.is_finite() && params.lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", params.lambda)));
    }
    if params.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be at least 1".into()));
    }
    if let Some(w) = weights {
        if w.len() != labels.len() {
            return Err(Error::LengthMismatch {
                pred: w.len(),
                gold: labels.len(),
            });
        }
        if w.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidParameter("instance weights must be finite and non-negative".into()));
        }
    }
    if vectors.is_empty() {
        return Err(Error::EmptyTrainingData);
    }
    let counts = class_counts(labels);
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::SingleClassData);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pairs = Vec::new();
    for (first, second) in PAIRS {
        if counts[first.index()] == 0 || counts[second.index()] == 0 {
            continue;
        }
        let data: Vec<(&FeatureVector, f64, f64)> = vectors
            .iter()
            .zip(labels)
            .enumerate()
            .filter(|(_, (_, &l))| l == first || l == second)
            .map(|(i, (x, &l))| {
                let y = if l == first { 1.0 } else { -1.0 };
                (x, y, weights.map_or(1.0, |w| w[i]))
            })
            .collect();
        let (plane, objective) = pegasos(&data, dim, params, &mut rng);
        pairs.push(PairModel {
            first,
            second,
            plane,
            objective,
        });
    }
    Ok(LinearSvmModel {
        dim,
        params: *params,
        pairs,
    })
}

/// Majority vote over the pairwise machines. A decision of exactly zero
/// casts no vote. Tied vote counts go to the tied label backed by the
/// single most confident decision, then to the earliest label.
pub fn predict_svm(model: &LinearSvmModel, v: &FeatureVector) -> Result<Label> {
    let decisions = model.decisions(v)?;
    let mut votes = [0usize; 3];
    let mut strongest = [0.0f64; 3];
    for &(first, second, d) in &decisions {
        let winner = if d > 0.0 {
            first
        } else if d < 0.0 {
            second
        } else {
            continue;
        };
        votes[winner.index()] += 1;
        strongest[winner.index()] = strongest[winner.index()].max(d.abs());
    }
    let top = *votes.iter().max().unwrap_or(&0);
    if top == 0 {
        // No machine voted: fall back to the earliest trained label.
        let first = model.pairs.iter().flat_map(|p| [p.first, p.second]).min();
        return first.ok_or(Error::EmptyTrainingData);
    }
    let mut best: Option<usize> = None;
    for i in 0..3 {
        if votes[i] != top {
            continue;
        }
        if best.is_none_or(|b| strongest[i] > strongest[b]) {
            best = Some(i);
        }
    }
    Ok(Label::ALL[best.unwrap()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(pairs: &[(usize, f64)]) -> FeatureVector {
        FeatureVector::from_pairs(pairs.to_vec())
    }

    fn model_with(decision_biases: [f64; 3]) -> LinearSvmModel {
        LinearSvmModel {
            dim: 1,
            params: SvmParams::default(),
            pairs: PAIRS
                .iter()
                .zip(decision_biases)
                .map(|(&(first, second), bias)| PairModel {
                    first,
                    second,
                    plane: Hyperplane {
                        weights: vec![0.0],
                        bias,
                    },
                    objective: vec![],
                })
                .collect(),
        }
    }

    #[test]
    fn separable_data() {
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let x = 1.0 + i as f64 * 0.1;
            vectors.push(fv(&[(0, x)]));
            labels.push(Label::Positive);
            vectors.push(fv(&[(1, x)]));
            labels.push(Label::Negative);
            vectors.push(fv(&[(2, x)]));
            labels.push(Label::Neutral);
        }
        let params = SvmParams {
            lambda: 0.01,
            ..SvmParams::default()
        };
        let m = train_svm(&vectors, &labels, 3, None, &params).unwrap();
        for (v, l) in vectors.iter().zip(&labels) {
            assert_eq!(predict_svm(&m, v).unwrap(), *l);
        }
    }

    #[test]
    fn cyclic_tie_uses_most_confident_pair() {
        // pos>neg (0.9), neu>neg... constructed so each label gets one vote:
        // (pos,neg) +0.9 -> pos, (neu,neg) -0.2 -> neg, (pos,neu) -0.1 -> neu.
        let m = model_with([0.9, -0.2, -0.1]);
        assert_eq!(predict_svm(&m, &fv(&[])).unwrap(), Label::Positive);
        let m = model_with([0.1, -0.2, -0.9]);
        assert_eq!(predict_svm(&m, &fv(&[])).unwrap(), Label::Neutral);
    }

    #[test]
    fn zero_decision_casts_no_vote() {
        // (pos,neg) 0 -> none, (neu,neg) +0.5 -> neu, (pos,neu) -0.5 -> neu.
        let m = model_with([0.0, 0.5, -0.5]);
        assert_eq!(predict_svm(&m, &fv(&[])).unwrap(), Label::Neutral);
        let m = model_with([0.0, 0.0, 0.0]);
        assert_eq!(predict_svm(&m, &fv(&[])).unwrap(), Label::Negative);
    }

    #[test]
    fn missing_class_pairs_are_skipped() {
        let vectors = vec![fv(&[(0, 1.0)]), fv(&[(1, 1.0)])];
        let labels = vec![Label::Positive, Label::Neutral];
        let m = train_svm(&vectors, &labels, 2, None, &SvmParams::default()).unwrap();
        assert_eq!(m.pairs().len(), 1);
        assert_eq!(predict_svm(&m, &vectors[0]).unwrap(), Label::Positive);
        assert_eq!(predict_svm(&m, &vectors[1]).unwrap(), Label::Neutral);
    }

    #[test]
    fn single_class_rejected() {
        let vectors = vec![fv(&[(0, 1.0)]); 3];
        assert!(matches!(
            train_svm(&vectors, &[Label::Positive; 3], 1, None, &SvmParams::default()),
            Err(Error::SingleClassData)
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let vectors: Vec<_> = (0..20).map(|i| fv(&[(i % 4, 1.0), (4, (i as f64).sin())])).collect();
        let labels: Vec<_> = (0..20).map(|i| Label::ALL[i % 3]).collect();
        let a = train_svm(&vectors, &labels, 5, None, &SvmParams::default()).unwrap();
        let b = train_svm(&vectors, &labels, 5, None, &SvmParams::default()).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn reported_objective_never_increases(
            xs in prop::collection::vec((0.0f64..2.0, 0.0f64..2.0, any::<bool>()), 4..30),
            seed in 0u64..50,
        ) {
            let vectors: Vec<_> = xs.iter().map(|&(a, b, _)| fv(&[(0, a), (1, b)])).collect();
            let mut labels: Vec<_> = xs.iter().map(|&(_, _, p)| if p { Label::Positive } else { Label::Negative }).collect();
            labels[0] = Label::Positive;
            labels[1] = Label::Negative;
            let params = SvmParams { lambda: 0.05, epochs: 10, seed };
            let m = train_svm(&vectors, &labels, 2, None, &params).unwrap();
            let pair = &m.pairs()[0];
            let data: Vec<_> = vectors.iter().zip(&labels)
                .map(|(v, l)| (v, if *l == Label::Positive { 1.0 } else { -1.0 }, 1.0))
                .collect();
            let reported = objective(&pair.plane, &data, params.lambda);
            prop_assert!((reported - pair.objective[pair.objective.len() - 1]).abs() < 1e-9);
            for w in pair.objective.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }
    }
}
